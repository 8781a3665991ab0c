#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "edpm/model.hpp"
#include "edpm/urn_state.hpp"

namespace edpm {

enum class Representation { blocked, urn };

// One retained posterior draw. Blocked-Gibbs draws carry the truncated
// state; urn draws carry occupied clusters only.
struct ChainDraw {
  std::size_t iter = 0;
  std::variant<GibbsState, UrnState> state;

  Representation representation() const {
    return std::holds_alternative<GibbsState>(state) ? Representation::blocked
                                                     : Representation::urn;
  }
  double alpha_theta() const;
  // max_k alpha^{psi|theta}_k over the clusters present in the draw.
  double alpha_psi_max() const;
};

struct Chain {
  std::vector<ChainDraw> draws;

  bool empty() const { return draws.empty(); }
  std::size_t size() const { return draws.size(); }
};

// Called once per retained draw, in iteration order.
using DrawObserver = std::function<void(const ChainDraw&)>;

}  // namespace edpm
