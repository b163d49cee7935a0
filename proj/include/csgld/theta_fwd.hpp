#pragma once

namespace csgld {
class theta_estimate;
}  // namespace csgld
