#include "helmfmm/fmm.hpp"

#include <algorithm>
#include <numeric>

#include "translation.hpp"

namespace helmfmm::fmm {

namespace {

using special::KernelKind;

constexpr int kMaxOrder = special::kMaxBesselOrder / 2 - 1;

Complex kernelEntry(const KernelId& kernel, Vec2 source, Vec2 target, const Vec2* normal) {
  if (source == target) return {0.0, 0.0};
  return normal != nullptr ? special::greensNormalDeriv(kernel, source, target, *normal)
                           : special::greens(kernel, source, target);
}

}  // namespace

std::string toString(Backend backend) { return backend == Backend::Direct ? "direct" : "fmm"; }

int accuracyToOrder(double epsilon) {
  if (!(epsilon >= 1e-12) || epsilon > 0.5) throw DomainError("epsilon must lie in [1e-12, 0.5]");
  const int p = static_cast<int>(std::ceil(-std::log10(epsilon) - 1e-9));
  return std::max(p, 1);
}

FmmConfig FmmConfig::fromEpsilon(const KernelId& kernel, double epsilon) {
  FmmConfig config;
  config.kernel = kernel;
  config.p = accuracyToOrder(epsilon);
  config.epsilon = epsilon;
  return config;
}

void FmmConfig::validate() const {
  if (p < 1 || p > kMaxOrder) throw DomainError("FmmConfig: p out of range [1, 31]");
  if (!(theta > 0.0) || theta > 1.0) throw DomainError("FmmConfig: theta must lie in (0, 1]");
  if (ncrit < 1) throw DomainError("FmmConfig: ncrit must be >= 1");
  if (maxKappaRadius < 0.0) throw DomainError("FmmConfig: maxKappaRadius must be >= 0");
  if (epsilon && accuracyToOrder(*epsilon) != p) throw DomainError("FmmConfig: p does not match epsilon");
  if (backend == Backend::Fmm && !kernel.is2d()) throw DomainError("FmmConfig: 3D kernels need the Direct backend");
}

struct FmmPlan::Impl {
  FmmConfig config;
  std::size_t sourceCount = 0;
  std::size_t targetCount = 0;
  bool dipole = false;
  PlanStats stats;

  // Direct backend, original ordering.
  std::vector<Vec2> sources;
  std::vector<Vec2> targets;
  std::vector<Vec2> normals;
  CVector dense;

  // Fmm backend, tree ordering.
  std::optional<tree::Tree> sourceTree;
  std::optional<tree::Tree> targetTree;
  int p = 0;
  std::size_t ncoef = 0;
  std::vector<Vec2> treeSources;
  std::vector<Vec2> treeNormals;
  std::vector<Vec2> treeTargets;
  CVector p2mBasis;  // per source body
  CVector l2pBasis;  // per target body, kernel prefactor included
  std::vector<int> sourceLeaves;
  std::vector<int> targetLeaves;
  CVector m2mShift;  // per source cell, Helmholtz only
  CVector l2lShift;  // per target cell, Helmholtz only
  std::vector<std::pair<int, int>> far;
  CVector m2lShift;  // per far pair, Helmholtz only
  struct Near {
    int source;
    int target;
    std::ptrdiff_t offset;  // into blocks, −1 when recomputed on the fly
  };
  std::vector<Near> near;
  CVector blocks;

  bool helmholtz() const { return config.kernel.kind() == KernelKind::Helmholtz2D; }
  std::size_t shiftLength() const { return static_cast<std::size_t>(4 * p + 1); }

  void buildDirect();
  void buildFmm();
  CVector evaluateDirect(std::span<const Complex> charges) const;
  CVector evaluateFmm(std::span<const Complex> charges) const;
};

void FmmPlan::Impl::buildDirect() {
  const std::size_t bytes = sourceCount * targetCount * sizeof(Complex);
  if (bytes > config.cacheBytes) return;
  dense.resize(sourceCount * targetCount);
  for (std::size_t j = 0; j < targetCount; ++j) {
    for (std::size_t i = 0; i < sourceCount; ++i) {
      dense[j * sourceCount + i] = kernelEntry(config.kernel, sources[i], targets[j], dipole ? &normals[i] : nullptr);
    }
  }
  stats.cachedBytes = bytes;
}

CVector FmmPlan::Impl::evaluateDirect(std::span<const Complex> charges) const {
  CVector out(targetCount);
  for (std::size_t j = 0; j < targetCount; ++j) {
    Complex sum(0.0, 0.0);
    if (!dense.empty()) {
      const Complex* row = dense.data() + j * sourceCount;
      for (std::size_t i = 0; i < sourceCount; ++i) sum += row[i] * charges[i];
    } else {
      for (std::size_t i = 0; i < sourceCount; ++i) {
        sum += kernelEntry(config.kernel, sources[i], targets[j], dipole ? &normals[i] : nullptr) * charges[i];
      }
    }
    out[j] = sum;
  }
  return out;
}

void FmmPlan::Impl::buildFmm() {
  p = config.p;
  ncoef = static_cast<std::size_t>(2 * p + 1);
  sourceTree = tree::Tree::build(sources, config.ncrit, config.maxLevel);
  targetTree = tree::Tree::build(targets, config.ncrit, config.maxLevel);
  const auto& sc = sourceTree->cells();
  const auto& tc = targetTree->cells();
  stats.sourceCells = sc.size();
  stats.targetCells = tc.size();

  treeSources.resize(sourceCount);
  for (std::size_t i = 0; i < sourceCount; ++i) treeSources[i] = sourceTree->bodies()[i].position;
  if (dipole) {
    treeNormals.resize(sourceCount);
    for (std::size_t i = 0; i < sourceCount; ++i) treeNormals[i] = normals[sourceTree->permutation()[i]];
  }
  treeTargets.resize(targetCount);
  for (std::size_t j = 0; j < targetCount; ++j) treeTargets[j] = targetTree->bodies()[j].position;
  sourceLeaves = sourceTree->leaves();
  targetLeaves = targetTree->leaves();

  const double kappa = config.kernel.kappa();
  const bool checkWave = helmholtz() && config.maxKappaRadius > 0.0;
  auto admissible = [&](const tree::Cell& s, const tree::Cell& t) {
    return !checkWave || kappa * std::max(s.radius(), t.radius()) <= config.maxKappaRadius;
  };
  tree::InteractionLists lists = tree::dualTraversal(*sourceTree, *targetTree, config.theta, admissible);
  auto byTarget = [](const std::pair<int, int>& a, const std::pair<int, int>& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  };
  std::sort(lists.farPairs.begin(), lists.farPairs.end(), byTarget);
  std::sort(lists.nearPairs.begin(), lists.nearPairs.end(), byTarget);
  far = std::move(lists.farPairs);
  stats.farPairs = far.size();
  stats.nearPairs = lists.nearPairs.size();

  // Per-body expansion bases.
  p2mBasis.assign(sourceCount * ncoef, Complex(0.0, 0.0));
  for (int leaf : sourceLeaves) {
    const tree::Cell& cell = sc[static_cast<std::size_t>(leaf)];
    for (std::size_t i = cell.begin; i < cell.end; ++i) {
      Complex* row = p2mBasis.data() + i * ncoef;
      if (helmholtz()) {
        detail::helmholtzP2M(kappa, treeSources[i] - cell.center, dipole ? &treeNormals[i] : nullptr, 1.0, p, row);
      } else {
        const Complex n = dipole ? toComplex(treeNormals[i]) : Complex();
        detail::laplaceP2M(toComplex(treeSources[i] - cell.center), dipole ? &n : nullptr, 1.0, p, row);
      }
    }
  }
  l2pBasis.assign(targetCount * ncoef, Complex(0.0, 0.0));
  for (int leaf : targetLeaves) {
    const tree::Cell& cell = tc[static_cast<std::size_t>(leaf)];
    for (std::size_t j = cell.begin; j < cell.end; ++j) {
      Complex* row = l2pBasis.data() + j * ncoef;
      if (helmholtz()) {
        detail::regularBasis(kappa, treeTargets[j] - cell.center, p, row);
        for (std::size_t m = 0; m < ncoef; ++m) row[m] *= Complex(0.0, 0.25);
      } else {
        const Complex z = toComplex(treeTargets[j] - cell.center);
        const double prefactor = -1.0 / (2.0 * kPi);
        row[p] = prefactor;
        Complex power = 1.0;
        for (int l = 1; l <= p; ++l) {
          power *= z;
          row[p + l] = 0.5 * prefactor * power;
          row[p - l] = 0.5 * prefactor * std::conj(power);
        }
      }
    }
  }

  if (helmholtz()) {
    const std::size_t len = shiftLength();
    m2mShift.assign(sc.size() * len, Complex(0.0, 0.0));
    for (std::size_t c = 1; c < sc.size(); ++c) {
      const auto& parent = sc[static_cast<std::size_t>(sc[c].parent)];
      detail::helmholtzShift(kappa, parent.center - sc[c].center, 2 * p, false, m2mShift.data() + c * len);
    }
    l2lShift.assign(tc.size() * len, Complex(0.0, 0.0));
    for (std::size_t c = 1; c < tc.size(); ++c) {
      const auto& parent = tc[static_cast<std::size_t>(tc[c].parent)];
      detail::helmholtzShift(kappa, tc[c].center - parent.center, 2 * p, false, l2lShift.data() + c * len);
    }
    m2lShift.assign(far.size() * len, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < far.size(); ++k) {
      const auto& s = sc[static_cast<std::size_t>(far[k].first)];
      const auto& t = tc[static_cast<std::size_t>(far[k].second)];
      detail::helmholtzShift(kappa, t.center - s.center, 2 * p, true, m2lShift.data() + k * len);
    }
  }

  // Near-field blocks, cached in order until the byte budget runs out.
  std::size_t used = 0;
  near.reserve(lists.nearPairs.size());
  std::vector<std::ptrdiff_t> offsets;
  for (const auto& [s, t] : lists.nearPairs) {
    const std::size_t bytes = sc[static_cast<std::size_t>(s)].size() * tc[static_cast<std::size_t>(t)].size() * sizeof(Complex);
    std::ptrdiff_t offset = -1;
    if (used + bytes <= config.cacheBytes) {
      offset = static_cast<std::ptrdiff_t>(used / sizeof(Complex));
      used += bytes;
    }
    near.push_back({s, t, offset});
  }
  blocks.resize(used / sizeof(Complex));
  for (const Near& pair : near) {
    if (pair.offset < 0) continue;
    const auto& s = sc[static_cast<std::size_t>(pair.source)];
    const auto& t = tc[static_cast<std::size_t>(pair.target)];
    Complex* block = blocks.data() + pair.offset;
    for (std::size_t j = t.begin; j < t.end; ++j) {
      for (std::size_t i = s.begin; i < s.end; ++i) {
        *block++ = kernelEntry(config.kernel, treeSources[i], treeTargets[j], dipole ? &treeNormals[i] : nullptr);
      }
    }
  }
  stats.cachedBytes = used;
}

CVector FmmPlan::Impl::evaluateFmm(std::span<const Complex> charges) const {
  const auto& sc = sourceTree->cells();
  const auto& tc = targetTree->cells();
  const CVector w = sourceTree->toTreeOrder(charges);
  CVector u(targetCount, Complex(0.0, 0.0));

  if (!far.empty()) {
    CVector multipoles(sc.size() * ncoef, Complex(0.0, 0.0));
    for (int leaf : sourceLeaves) {
      const tree::Cell& cell = sc[static_cast<std::size_t>(leaf)];
      Complex* m = multipoles.data() + static_cast<std::size_t>(leaf) * ncoef;
      for (std::size_t i = cell.begin; i < cell.end; ++i) {
        const Complex* basis = p2mBasis.data() + i * ncoef;
        for (std::size_t k = 0; k < ncoef; ++k) m[k] += basis[k] * w[i];
      }
    }
    for (std::size_t c = sc.size() - 1; c >= 1; --c) {
      const std::size_t parent = static_cast<std::size_t>(sc[c].parent);
      const Complex* child = multipoles.data() + c * ncoef;
      Complex* out = multipoles.data() + parent * ncoef;
      if (helmholtz()) {
        detail::applyShift(child, m2mShift.data() + c * shiftLength(), p, out);
      } else {
        detail::laplaceM2M(child, p, toComplex(sc[c].center - sc[parent].center), out);
      }
    }

    CVector locals(tc.size() * ncoef, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < far.size(); ++k) {
      const auto s = static_cast<std::size_t>(far[k].first);
      const auto t = static_cast<std::size_t>(far[k].second);
      const Complex* m = multipoles.data() + s * ncoef;
      Complex* l = locals.data() + t * ncoef;
      if (helmholtz()) {
        detail::applyShift(m, m2lShift.data() + k * shiftLength(), p, l);
      } else {
        detail::laplaceM2L(m, p, toComplex(sc[s].center - tc[t].center), l);
      }
    }
    for (std::size_t c = 1; c < tc.size(); ++c) {
      const std::size_t parent = static_cast<std::size_t>(tc[c].parent);
      const Complex* in = locals.data() + parent * ncoef;
      Complex* out = locals.data() + c * ncoef;
      if (helmholtz()) {
        detail::applyShift(in, l2lShift.data() + c * shiftLength(), p, out);
      } else {
        detail::laplaceL2L(in, p, toComplex(tc[c].center - tc[parent].center), out);
      }
    }
    for (int leaf : targetLeaves) {
      const tree::Cell& cell = tc[static_cast<std::size_t>(leaf)];
      const Complex* l = locals.data() + static_cast<std::size_t>(leaf) * ncoef;
      for (std::size_t j = cell.begin; j < cell.end; ++j) {
        const Complex* basis = l2pBasis.data() + j * ncoef;
        Complex sum(0.0, 0.0);
        for (std::size_t k = 0; k < ncoef; ++k) sum += basis[k] * l[k];
        u[j] += sum;
      }
    }
  }

  for (const Near& pair : near) {
    const auto& s = sc[static_cast<std::size_t>(pair.source)];
    const auto& t = tc[static_cast<std::size_t>(pair.target)];
    if (pair.offset >= 0) {
      const Complex* block = blocks.data() + pair.offset;
      for (std::size_t j = t.begin; j < t.end; ++j) {
        Complex sum(0.0, 0.0);
        for (std::size_t i = s.begin; i < s.end; ++i) sum += *block++ * w[i];
        u[j] += sum;
      }
    } else {
      for (std::size_t j = t.begin; j < t.end; ++j) {
        Complex sum(0.0, 0.0);
        for (std::size_t i = s.begin; i < s.end; ++i) {
          sum += kernelEntry(config.kernel, treeSources[i], treeTargets[j], dipole ? &treeNormals[i] : nullptr) * w[i];
        }
        u[j] += sum;
      }
    }
  }
  return targetTree->fromTreeOrder(u);
}

FmmPlan::FmmPlan(std::span<const Vec2> sources, std::span<const Vec2> targets, const FmmConfig& config,
                 std::span<const Vec2> normals)
    : impl_(std::make_unique<Impl>()) {
  config.validate();
  if (!config.kernel.is2d()) throw DomainError("FmmPlan handles 2D kernels; use the Vec3 evaluate overload");
  if (!normals.empty() && normals.size() != sources.size()) throw SizeError("FmmPlan: normals and sources differ in length");
  Impl& impl = *impl_;
  impl.config = config;
  impl.sourceCount = sources.size();
  impl.targetCount = targets.size();
  impl.dipole = !normals.empty();
  impl.sources.assign(sources.begin(), sources.end());
  impl.targets.assign(targets.begin(), targets.end());
  impl.normals.assign(normals.begin(), normals.end());
  if (sources.empty() || targets.empty()) return;
  if (config.backend == Backend::Direct) {
    impl.buildDirect();
  } else {
    impl.buildFmm();
  }
}

FmmPlan::~FmmPlan() = default;
FmmPlan::FmmPlan(FmmPlan&&) noexcept = default;
FmmPlan& FmmPlan::operator=(FmmPlan&&) noexcept = default;

CVector FmmPlan::evaluate(std::span<const Complex> charges) const {
  const Impl& impl = *impl_;
  if (charges.size() != impl.sourceCount) throw SizeError("FmmPlan::evaluate: charge vector has the wrong length");
  if (impl.sourceCount == 0 || impl.targetCount == 0) return CVector(impl.targetCount);
  return impl.config.backend == Backend::Direct ? impl.evaluateDirect(charges) : impl.evaluateFmm(charges);
}

std::size_t FmmPlan::sourceCount() const { return impl_->sourceCount; }
std::size_t FmmPlan::targetCount() const { return impl_->targetCount; }
const FmmConfig& FmmPlan::config() const { return impl_->config; }
PlanStats FmmPlan::stats() const { return impl_->stats; }

CVector evaluate(std::span<const Vec2> sources, std::span<const Complex> charges, std::span<const Vec2> targets,
                 const FmmConfig& config) {
  if (charges.size() != sources.size()) throw SizeError("evaluate: charges and sources differ in length");
  FmmConfig oneShot = config;
  oneShot.cacheBytes = 0;
  return FmmPlan(sources, targets, oneShot).evaluate(charges);
}

CVector evaluateDipole(std::span<const Vec2> sources, std::span<const Vec2> normals, std::span<const Complex> charges,
                       std::span<const Vec2> targets, const FmmConfig& config) {
  if (charges.size() != sources.size()) throw SizeError("evaluateDipole: charges and sources differ in length");
  FmmConfig oneShot = config;
  oneShot.cacheBytes = 0;
  return FmmPlan(sources, targets, oneShot, normals).evaluate(charges);
}

CVector evaluate(std::span<const Vec3> sources, std::span<const Complex> charges, std::span<const Vec3> targets,
                 const FmmConfig& config) {
  if (charges.size() != sources.size()) throw SizeError("evaluate: charges and sources differ in length");
  if (config.backend != Backend::Direct) throw DomainError("3D kernels are available through the Direct backend only");
  if (config.kernel.is2d()) throw DomainError("Vec3 evaluate needs a 3D kernel");
  CVector out(targets.size());
  for (std::size_t j = 0; j < targets.size(); ++j) {
    Complex sum(0.0, 0.0);
    for (std::size_t i = 0; i < sources.size(); ++i) {
      if (sources[i] == targets[j]) continue;
      sum += charges[i] * special::greens(config.kernel, sources[i], targets[j]);
    }
    out[j] = sum;
  }
  return out;
}

}  // namespace helmfmm::fmm
