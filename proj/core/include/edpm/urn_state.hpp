#pragma once

#include <cstddef>
#include <vector>

#include "edpm/model.hpp"

namespace edpm {

struct UrnPsiCluster {
  PsiAtom atom;
  std::size_t size = 0;
};

// An occupied theta-cluster with its nested psi-clusters. alpha_psi travels
// with the cluster.
struct UrnThetaCluster {
  ThetaAtom atom;
  double alpha_psi = 1.0;
  std::size_t size = 0;
  std::vector<UrnPsiCluster> psi;
};

// Marginal (Polya urn) representation: only occupied clusters are kept.
// K[i] indexes `clusters`, J[i] indexes `clusters[K[i]].psi`.
struct UrnState {
  std::vector<UrnThetaCluster> clusters;
  std::vector<int> K;
  std::vector<int> J;
  double alpha_theta = 1.0;
  // Given to new theta-clusters when alpha_psi is shared or frozen.
  double alpha_psi_common = 1.0;
  int m_aux = 3;

  std::size_t n() const { return K.size(); }

  // Labels agree with cluster sizes and no cluster is empty.
  void check_invariants() const;
};

}  // namespace edpm
