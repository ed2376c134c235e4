#include "arcube/kinematics.hpp"

namespace arcube {

const std::array<BranchFlags, 16>& all_branch_flags() {
  static const std::array<BranchFlags, 16> flags = [] {
    std::array<BranchFlags, 16> all{};
    for (int bits = 0; bits < 16; ++bits) {
      auto sign = [bits](int bit) { return (bits >> bit) & 1 ? -1 : +1; };
      all[static_cast<std::size_t>(bits)] = BranchFlags{{sign(0), sign(1)}, {sign(2), sign(3)}};
    }
    return all;
  }();
  return flags;
}

}  // namespace arcube
