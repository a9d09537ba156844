#pragma once

#include <string>

#include "flowaudit/bugspec.hpp"

namespace flowaudit {

std::string default_few_shot(BugKind kind);

} // namespace flowaudit
