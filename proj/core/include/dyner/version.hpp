#pragma once

namespace dyner {

/// "v<major.minor.patch>-g<git describe>" captured at configure time.
const char* version_string() noexcept;

}  // namespace dyner
