#include "audit/few_shot.hpp"

namespace flowaudit {

// Default worked examples for the analysis prompt. Editable copies ship in
// data/few_shot/; point --few-shot-dir there (or anywhere) to override.

std::string default_few_shot(BugKind kind) {
    switch (kind) {
    case BugKind::NullDereference:
        return R"(Given this function and the tracked value NULL assigned to q at line 3:
1 | int pick(int flag) {
2 |     int *q;
3 |     q = NULL;
4 |     if (flag) {
5 |         q = &flag;
6 |     }
7 |     return *q;
8 | }
a correct answer is:
PATH 1
STMT 3
STMT 4
STMT 7
FACT NULL@3 -> q@3
FACT q@3 -> q@7
COND flag == 0
END
PATH 2
STMT 3
STMT 4
STMT 5
STMT 7
FACT NULL@3 -> q@3
COND flag != 0
END
)";
    case BugKind::MemoryLeak:
        return R"(Given this function and the tracked value buf assigned at line 2:
1 | int produce(int n) {
2 |     char *buf = malloc(16);
3 |     if (n < 0) {
4 |         return -1;
5 |     }
6 |     consume(buf);
7 |     return 0;
8 | }
a correct answer is:
PATH 1
STMT 2
STMT 3
STMT 4
COND n < 0
END
PATH 2
STMT 2
STMT 3
STMT 6
STMT 7
FACT buf@2 -> buf@6
ESCAPE ARG buf@6 CALLEE consume INDEX 0
COND n >= 0
END
)";
    case BugKind::UseAfterFree:
        return R"(Given this function and the tracked value obj passed to free at line 3:
1 | int drop(struct item *obj, int again) {
2 |     int k = obj->key;
3 |     free(obj);
4 |     if (again) {
5 |         k += obj->key;
6 |     }
7 |     return k;
8 | }
a correct answer is:
PATH 1
STMT 3
STMT 4
STMT 5
STMT 7
FACT obj@3 -> obj@5
COND again != 0
END
PATH 2
STMT 3
STMT 4
STMT 7
COND again == 0
END
)";
    }
    return {};
}

} // namespace flowaudit
