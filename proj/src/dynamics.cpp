#include <boxworld/dynamics.hpp>
#include <boxworld/errors.hpp>
#include <boxworld/label_text.hpp>
#include <boxworld/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>

namespace boxworld {

EffectPermutation EffectPermutation::identity(std::size_t n) {
  EffectPermutation p;
  p.image.resize(n);
  std::iota(p.image.begin(), p.image.end(), std::size_t{0});
  return p;
}

bool is_bijection(const EffectPermutation& p) {
  std::vector<char> seen(p.size(), 0);
  for (auto v : p.image) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

EffectPermutation compose(const EffectPermutation& outer, const EffectPermutation& inner) {
  if (outer.size() != inner.size()) throw DimensionError("compose: permutations of different sizes");
  EffectPermutation out;
  out.image.reserve(inner.size());
  for (auto v : inner.image) out.image.push_back(outer(v));
  return out;
}

EffectPermutation inverse(const EffectPermutation& p) {
  EffectPermutation out;
  out.image.resize(p.size());
  for (std::size_t l = 0; l < p.size(); ++l) out.image[p(l)] = l;
  return out;
}

bool TrivialForm::swaps_systems() const {
  for (std::size_t i = 0; i < system_permutation.size(); ++i)
    if (system_permutation[i] != static_cast<int>(i)) return true;
  return false;
}

bool SystemSubset::contains(int i) const { return std::find(systems.begin(), systems.end(), i) != systems.end(); }

SystemSubset SystemSubset::all(int n) {
  SystemSubset s;
  for (int i = 0; i < n; ++i) s.systems.push_back(i);
  return s;
}

int hamming_distance(const JointEffectLabel& a, const JointEffectLabel& b) {
  if (a.components.size() != b.components.size())
    throw DimensionError("hamming_distance: labels have " + std::to_string(a.components.size()) + " and " +
                         std::to_string(b.components.size()) + " components");
  int d = 0;
  for (std::size_t i = 0; i < a.components.size(); ++i) d += a.components[i] != b.components[i];
  return d;
}

namespace {

std::vector<long> integer_coords(const EffectVector& v) {
  std::vector<long> out;
  out.reserve(static_cast<std::size_t>(v.coords.size()));
  for (const auto& q : v.coords) {
    if (!is_integral(q)) throw ConstructionBug("fiducial vector with a non-integer coordinate");
    out.push_back(boost::multiprecision::numerator(q).convert_to<long>());
  }
  return out;
}

int label_distance(const FiducialAlphabet& alphabet, int systems, std::size_t a, std::size_t b) {
  int d = 0;
  for (int i = 0; i < systems; ++i) d += alphabet.component(a, i) != alphabet.component(b, i);
  return d;
}

}  // namespace

TransformFrame::TransformFrame(const FiducialFrame& frame) : TransformFrame(frame, *std::make_unique<BudgetMeter>()) {}

TransformFrame::TransformFrame(const FiducialFrame& frame, BudgetMeter& meter)
    : frame_(&frame), polytope_(build_polytope(frame.multi())) {
  const auto d = frame.multi().joint_dimension();
  linalg::IncrementalBasis<Rational> basis(d);
  for (std::size_t l = 0; l < frame.label_count() && !basis.full(); ++l)
    if (basis.try_add(frame.vector(l).coords)) spanning_.push_back(l);
  if (!basis.full()) throw ConstructionBug("fiducial vectors do not span the joint space");
  MatrixQ b(d, d);
  for (Eigen::Index k = 0; k < d; ++k) b.col(k) = frame.vector(spanning_[static_cast<std::size_t>(k)]).coords;
  auto inv = linalg::inverse(b);
  if (!inv) throw ConstructionBug("spanning labels are singular");
  spanning_inverse_ = std::move(*inv);
  for (std::size_t l = 0; l < frame.label_count(); ++l) by_vector_.emplace(integer_coords(frame.vector(l)), l);
  enumerate_vertices(polytope_, meter);
}

std::optional<std::size_t> TransformFrame::find_label(const EffectVector& v) const {
  for (const auto& q : v.coords)
    if (!is_integral(q)) return std::nullopt;
  auto it = by_vector_.find(integer_coords(v));
  if (it == by_vector_.end()) return std::nullopt;
  return it->second;
}

std::optional<LinearExtension> linear_extension(const TransformFrame& tf, const EffectPermutation& perm) {
  const auto& frame = tf.fiducial();
  if (perm.size() != frame.label_count() || !is_bijection(perm)) return std::nullopt;
  const auto d = frame.multi().joint_dimension();
  MatrixQ images(d, d);
  for (Eigen::Index k = 0; k < d; ++k) images.col(k) = frame.vector(perm(tf.spanning_[static_cast<std::size_t>(k)])).coords;
  LinearExtension ext{images * tf.spanning_inverse_};
  for (std::size_t l = 0; l < frame.label_count(); ++l)
    if (VectorQ(ext.adjoint * frame.vector(l).coords) != frame.vector(perm(l)).coords) return std::nullopt;
  return ext;
}

namespace {

using MatrixL = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>;

// Common denominator of a rational matrix, or 0 when it or a scaled entry
// leaves the range where integer products cannot overflow.
long common_denominator(const MatrixQ& m) {
  Integer den = 1;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(m(r, c)));
  const Integer limit = Integer(1) << 20;
  if (den > limit) return 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (boost::multiprecision::abs(Rational(m(r, c) * Rational(den))) > Rational(limit)) return 0;
  return den.convert_to<long>();
}

MatrixL scaled(const MatrixQ& m, long den) {
  MatrixL out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out(r, c) = boost::multiprecision::numerator(Rational(m(r, c) * Rational(den))).convert_to<long>();
  return out;
}

}  // namespace

bool is_allowed_reversible(const TransformFrame& tf, const EffectPermutation& perm) {
  const auto& vertices = tf.vertices();
  const auto& ineq = tf.polytope().inequalities();
  const auto d = ineq.cols();
  const auto nv = static_cast<Eigen::Index>(vertices.size());
  MatrixQ v(d, nv);
  for (Eigen::Index k = 0; k < nv; ++k) v.col(k) = vertices[static_cast<std::size_t>(k)].coords;
  const long vden = common_denominator(v);
  const long aden = common_denominator(ineq);

  for (const auto& p : {perm, inverse(perm)}) {
    const auto ext = linear_extension(tf, p);
    if (!ext) return false;
    const MatrixQ t = ext->state_map();
    const long tden = common_denominator(t);
    if (vden && aden == 1 && tden) {
      // Same test as membership(), on integers: A (tden T) (vden V) >= 0 and
      // the unit row gives tden * vden.
      const MatrixL image = scaled(t, tden) * scaled(v, vden);
      const MatrixL values = scaled(ineq, 1) * image;
      if ((values.array() < 0).any()) return false;
      const MatrixL unit = scaled(MatrixQ(tf.polytope().equality().coords.transpose()), 1) * image;
      if ((unit.array() != tden * vden).any()) return false;
      continue;
    }
    for (const auto& vertex : vertices)
      if (!membership(tf.polytope(), StateVector{t * vertex.coords})) return false;
  }
  return true;
}

EffectPermutation apply(const FiducialFrame& frame, const TrivialForm& form) {
  const auto& multi = frame.multi();
  const auto& alphabet = frame.alphabet();
  if (form.system_permutation.size() != static_cast<std::size_t>(multi.size()) ||
      form.local.size() != form.system_permutation.size())
    throw DimensionError("trivial form does not match the system count");
  EffectPermutation out;
  out.image.resize(frame.label_count());
  for (std::size_t l = 0; l < frame.label_count(); ++l) {
    const auto label = alphabet.label(l);
    JointEffectLabel image;
    image.components.resize(label.components.size());
    for (std::size_t i = 0; i < label.components.size(); ++i) {
      const auto& c = label.components[i];
      const auto& q = form.local[i];
      image.components[static_cast<std::size_t>(form.system_permutation[i])] =
          c.is_unit() ? c : LocalEffectLabel::fiducial(q.measurement_map[c.measurement], q.outcome_map[c.measurement][c.outcome]);
    }
    out.image[l] = alphabet.index(image);
  }
  return out;
}

namespace {

std::size_t factorial(int n) {
  std::size_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::size_t>(k);
  return f;
}

// Every relabelling of `from`'s measurements onto `to`'s that preserves outcome counts.
std::vector<LocalRelabelling> local_relabellings(const SystemSpec& from, const SystemSpec& to) {
  std::vector<LocalRelabelling> out;
  const int m = from.measurements();
  std::vector<int> targets(m);
  std::iota(targets.begin(), targets.end(), 0);
  do {
    bool ok = true;
    for (int x = 0; x < m && ok; ++x) ok = from.outcomes(x) == to.outcomes(targets[x]);
    if (!ok) continue;
    std::vector<std::vector<int>> outcome(m);
    for (int x = 0; x < m; ++x) {
      outcome[x].resize(from.outcomes(x));
      std::iota(outcome[x].begin(), outcome[x].end(), 0);
    }
    // Odometer over the outcome permutations of every measurement.
    while (true) {
      out.push_back({targets, outcome});
      int x = m - 1;
      while (x >= 0 && !std::next_permutation(outcome[x].begin(), outcome[x].end())) --x;
      if (x < 0) break;
    }
  } while (std::next_permutation(targets.begin(), targets.end()));
  return out;
}

std::vector<std::vector<int>> same_type_permutations(const MultiSpec& multi) {
  std::vector<std::vector<int>> out;
  std::vector<int> p(multi.size());
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; i < multi.size() && ok; ++i) ok = same_type(multi.system(i), multi.system(p[i]));
    if (ok) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

std::size_t trivial_group_order(const MultiSpec& multi) {
  std::size_t order = same_type_permutations(multi).size();
  for (const auto& spec : multi.systems()) {
    std::map<int, int> classes;
    for (int x = 0; x < spec.measurements(); ++x) ++classes[spec.outcomes(x)];
    for (const auto& [k, m] : classes) {
      order *= factorial(m);
      for (int j = 0; j < m; ++j) order *= factorial(k);
    }
  }
  return order;
}

std::vector<TrivialElement> generate_trivial_group(const FiducialFrame& frame) {
  const auto& multi = frame.multi();
  multi.require_nonclassical("generate_trivial_group");
  const int n = multi.size();
  std::map<std::pair<int, int>, std::vector<LocalRelabelling>> locals;
  std::vector<TrivialElement> out;
  for (const auto& p : same_type_permutations(multi)) {
    std::vector<const std::vector<LocalRelabelling>*> choices;
    for (int i = 0; i < n; ++i) {
      auto key = std::make_pair(i, p[i]);
      auto it = locals.find(key);
      if (it == locals.end()) it = locals.emplace(key, local_relabellings(multi.system(i), multi.system(p[i]))).first;
      choices.push_back(&it->second);
    }
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      TrivialForm form{p, {}};
      for (int i = 0; i < n; ++i) form.local.push_back((*choices[i])[pick[i]]);
      out.push_back({apply(frame, form), std::move(form)});
      int i = n - 1;
      while (i >= 0 && ++pick[i] == choices[i]->size()) pick[i--] = 0;
      if (i < 0) break;
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.permutation < b.permutation; });
  for (std::size_t k = 1; k < out.size(); ++k)
    if (out[k].permutation == out[k - 1].permutation)
      throw ConstructionBug("trivial group: two forms give the same permutation");
  if (out.size() != trivial_group_order(multi))
    throw ConstructionBug("trivial group has " + std::to_string(out.size()) + " elements, expected " +
                          std::to_string(trivial_group_order(multi)));
  return out;
}

namespace {

// Arithmetic modulo the Mersenne prime 2^61 - 1. Ranks of integer vectors
// agree with their ranks over Q when every minor is smaller than the prime
// in absolute value, which the Hadamard bound certifies up front.
constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % kPrime);
}

std::uint64_t mod_pow(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  for (; e; e >>= 1, a = mod_mul(a, a))
    if (e & 1) r = mod_mul(r, a);
  return r;
}

std::uint64_t to_mod(long v) {
  const long m = v % static_cast<long>(kPrime);
  return static_cast<std::uint64_t>(m < 0 ? m + static_cast<long>(kPrime) : m);
}

using ModRow = std::vector<std::uint64_t>;

class ModEchelon {
 public:
  explicit ModEchelon(std::size_t dim) : dim_(dim) {}

  // Reduced form of v, and its first nonzero position (dim_ if zero).
  std::pair<ModRow, std::size_t> reduce(const std::vector<long>& v) const {
    ModRow r(dim_);
    for (std::size_t c = 0; c < dim_; ++c) r[c] = to_mod(v[c]);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const auto f = r[pivots_[k]];
      if (!f) continue;
      for (std::size_t c = 0; c < dim_; ++c) r[c] = (r[c] + kPrime - mod_mul(f, rows_[k][c])) % kPrime;
    }
    std::size_t p = 0;
    while (p < dim_ && !r[p]) ++p;
    return {std::move(r), p};
  }

  void push(ModRow r, std::size_t pivot) {
    const auto inv = mod_pow(r[pivot], kPrime - 2);
    for (auto& x : r) x = mod_mul(x, inv);
    rows_.push_back(std::move(r));
    pivots_.push_back(pivot);
  }
  void pop() {
    rows_.pop_back();
    pivots_.pop_back();
  }

 private:
  std::size_t dim_;
  std::vector<ModRow> rows_;
  std::vector<std::size_t> pivots_;
};

// Greedy domain order. Labels already in the span of the unit and the
// earlier labels come first (their images are forced); otherwise take the
// label that brings the most remaining labels into the span, breaking ties
// with components compared from the last system backwards.
std::vector<std::size_t> domain_order(const FiducialFrame& frame) {
  const auto& multi = frame.multi();
  const auto& alphabet = frame.alphabet();
  std::vector<std::size_t> rest(frame.label_count());
  std::iota(rest.begin(), rest.end(), std::size_t{0});
  auto key = [&](std::size_t l) {
    std::vector<int> k;
    for (int i = multi.size() - 1; i >= 0; --i) k.push_back(alphabet.component(l, i));
    return k;
  };
  std::stable_sort(rest.begin(), rest.end(), [&](auto a, auto b) { return key(a) < key(b); });

  linalg::IncrementalBasis<Rational> span(multi.joint_dimension());
  span.try_add(frame.unit().coords);
  std::vector<std::size_t> order;
  while (!rest.empty()) {
    auto pick = rest.end();
    for (auto it = rest.begin(); it != rest.end() && pick == rest.end(); ++it)
      if (span.contains(frame.vector(*it).coords)) pick = it;
    if (pick == rest.end()) {
      long best = -1;
      for (auto it = rest.begin(); it != rest.end(); ++it) {
        auto trial = span;
        trial.try_add(frame.vector(*it).coords);
        long closed = 0;
        for (auto other : rest)
          if (other != *it && trial.contains(frame.vector(other).coords)) ++closed;
        if (closed > best) best = closed, pick = it;
      }
    }
    span.try_add(frame.vector(*pick).coords);
    order.push_back(*pick);
    rest.erase(pick);
  }
  return order;
}

struct DomainStep {
  std::size_t label = 0;
  bool forced = false;
  /// Forced image = (sum_j numerators[j] * image of slot j) / denominator.
  std::vector<std::pair<std::size_t, long>> numerators;
  long denominator = 1;
};

class ReversibleSearch {
 public:
  ReversibleSearch(const TransformFrame& tf, BudgetMeter& meter) : tf_(tf), meter_(meter) {
    const auto& frame = tf.fiducial();
    const auto& multi = frame.multi();
    dim_ = static_cast<std::size_t>(multi.joint_dimension());
    for (std::size_t l = 0; l < frame.label_count(); ++l) vectors_.push_back(integer_coords(frame.vector(l)));
    unit_ = integer_coords(frame.unit());
    for (std::size_t l = 0; l < frame.label_count(); ++l) by_vector_.emplace(vectors_[l], l);

    const auto order = domain_order(frame);

    // Slot 0 is the unit, pinned to itself.
    linalg::IncrementalBasis<Rational> basis(multi.joint_dimension());
    basis.try_add(frame.unit().coords);
    slots_ = 1;
    for (auto l : order) {
      DomainStep step{l, false, {}, 1};
      if (!basis.try_add(frame.vector(l).coords)) {
        step.forced = true;
        const auto c = *basis.coordinates(frame.vector(l).coords);
        Integer den = 1;
        for (const auto& q : c) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(q));
        for (Eigen::Index j = 0; j < c.size(); ++j)
          if (c(j) != 0)
            step.numerators.emplace_back(static_cast<std::size_t>(j),
                                         Integer(boost::multiprecision::numerator(c(j)) * (den / boost::multiprecision::denominator(c(j)))).convert_to<long>());
        step.denominator = den.convert_to<long>();
      } else {
        ++slots_;
      }
      steps_.push_back(std::move(step));
    }

    // Hadamard bound on minors of the fiducial and unit vectors.
    double log_bound = 0;
    double max_norm2 = 0;
    for (const auto& v : vectors_) {
      double n2 = 0;
      for (auto x : v) n2 += static_cast<double>(x) * static_cast<double>(x);
      max_norm2 = std::max(max_norm2, n2);
    }
    double u2 = 0;
    for (auto x : unit_) u2 += static_cast<double>(x) * static_cast<double>(x);
    max_norm2 = std::max(max_norm2, u2);
    log_bound = 0.5 * static_cast<double>(dim_) * std::log2(std::max(max_norm2, 1.0));
    if (log_bound >= 60.0) throw ResourceBudgetExceeded("joint dimension too large for the modular rank test");
  }

  std::vector<EffectPermutation> run() {
    const std::size_t n = vectors_.size();
    image_.assign(n, n);
    used_.assign(n, 0);
    slot_images_.assign(1, unit_);
    echelon_ = ModEchelon(dim_);
    auto [row, pivot] = echelon_.reduce(unit_);
    echelon_.push(std::move(row), pivot);
    descend(0);
    std::sort(found_.begin(), found_.end());
    return found_;
  }

 private:
  void descend(std::size_t depth) {
    if (depth == steps_.size()) {
      EffectPermutation p{image_};
      if (is_allowed_reversible(tf_, p)) found_.push_back(std::move(p));
      return;
    }
    const auto& step = steps_[depth];
    if (step.forced) {
      meter_.count_nodes();
      std::vector<long> w(dim_, 0);
      for (const auto& [slot, num] : step.numerators)
        for (std::size_t c = 0; c < dim_; ++c) w[c] += num * slot_images_[slot][c];
      for (auto& x : w) {
        if (x % step.denominator) return;
        x /= step.denominator;
      }
      auto it = by_vector_.find(w);
      if (it == by_vector_.end() || used_[it->second]) return;
      assign(step.label, it->second);
      descend(depth + 1);
      unassign(step.label);
      return;
    }
    for (std::size_t c = 0; c < vectors_.size(); ++c) {
      if (used_[c]) continue;
      meter_.count_nodes();
      auto [row, pivot] = echelon_.reduce(vectors_[c]);
      if (pivot == dim_) continue;
      echelon_.push(std::move(row), pivot);
      slot_images_.push_back(vectors_[c]);
      assign(step.label, c);
      descend(depth + 1);
      unassign(step.label);
      slot_images_.pop_back();
      echelon_.pop();
    }
  }

  void assign(std::size_t l, std::size_t c) {
    image_[l] = c;
    used_[c] = 1;
  }
  void unassign(std::size_t l) {
    used_[image_[l]] = 0;
    image_[l] = vectors_.size();
  }

  const TransformFrame& tf_;
  BudgetMeter& meter_;
  std::size_t dim_ = 0;
  std::size_t slots_ = 0;
  std::vector<std::vector<long>> vectors_;
  std::vector<long> unit_;
  std::map<std::vector<long>, std::size_t> by_vector_;
  std::vector<DomainStep> steps_;
  std::vector<std::size_t> image_;
  std::vector<char> used_;
  std::vector<std::vector<long>> slot_images_;
  ModEchelon echelon_{0};
  std::vector<EffectPermutation> found_;
};

}  // namespace

std::vector<EffectPermutation> enumerate_reversible(const TransformFrame& tf, BudgetMeter& meter) {
  tf.multi().require_nonclassical("enumerate_reversible");
  return ReversibleSearch(tf, meter).run();
}

std::optional<TrivialForm> decompose_trivial(const FiducialFrame& frame, const EffectPermutation& perm) {
  const auto& multi = frame.multi();
  const auto& alphabet = frame.alphabet();
  const int n = multi.size();
  if (perm.size() != frame.label_count() || !is_bijection(perm)) return std::nullopt;

  for (std::size_t l = 0; l < perm.size(); ++l)
    for (int i = 0; i < n; ++i)
      for (int v = alphabet.component(l, i) + 1; v < alphabet.radix(i); ++v)
        if (label_distance(alphabet, n, perm(l), perm(alphabet.with_component(l, i, v))) != 1) return std::nullopt;

  // P from the component that moves when one input component moves.
  const std::size_t base = 0;
  TrivialForm form;
  form.system_permutation.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto moved = perm(alphabet.with_component(base, i, 1));
    int j = 0;
    while (alphabet.component(moved, j) == alphabet.component(perm(base), j)) ++j;
    form.system_permutation[i] = j;
  }
  {
    auto sorted = form.system_permutation;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i)
      if (sorted[i] != i) return std::nullopt;
  }

  // Q from the images of the base label with one component varied.
  for (int i = 0; i < n; ++i) {
    const int j = form.system_permutation[i];
    const auto& from = multi.system(i);
    const auto& to = multi.system(j);
    if (alphabet.radix(i) != alphabet.radix(j) || from.measurements() != to.measurements()) return std::nullopt;
    LocalRelabelling q;
    q.measurement_map.assign(from.measurements(), -1);
    q.outcome_map.resize(from.measurements());
    for (int x = 0; x < from.measurements(); ++x) {
      q.outcome_map[x].assign(from.outcomes(x), -1);
      for (int a = 0; a < from.outcomes(x); ++a) {
        const int v = alphabet.local_index(i, LocalEffectLabel::fiducial(x, a));
        const auto img = alphabet.local_label(j, alphabet.component(perm(alphabet.with_component(base, i, v)), j));
        if (q.measurement_map[x] < 0) q.measurement_map[x] = img.measurement;
        if (img.measurement != q.measurement_map[x] || to.outcomes(img.measurement) != from.outcomes(x))
          return std::nullopt;
        q.outcome_map[x][a] = img.outcome;
      }
    }
    form.local.push_back(std::move(q));
  }
  if (apply(frame, form) != perm) return std::nullopt;
  return form;
}

namespace {

int smallest_outcome_count(const SystemSpec& spec) {
  const auto& k = spec.outcome_counts();
  return *std::min_element(k.begin(), k.end());
}

// Catalog index of the image of sub-unit k, if the image is a sub-unit effect.
std::optional<std::size_t> subunit_image(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                         const EffectPermutation& perm, std::size_t k, int measurement) {
  const auto d = catalog.measurement_decomposition(k, measurement);
  std::vector<std::size_t> images;
  for (auto t : d.terms) images.push_back(perm(t));
  return catalog.find(profile_of(frame, make_decomposition(images)));
}

nlohmann::json labels_json(const FiducialFrame& frame, const std::vector<std::size_t>& terms) {
  auto j = nlohmann::json::array();
  for (auto t : terms) j.push_back(format_label(frame.alphabet().label(t)));
  return j;
}

void require_permutation(const FiducialFrame& frame, const EffectPermutation& perm) {
  if (perm.size() != frame.label_count() || !is_bijection(perm))
    throw DimensionError("effect permutation does not match the fiducial alphabet");
}

}  // namespace

Report verify_subunit_images(const FiducialFrame& frame, const SubunitCatalog& catalog, const EffectPermutation& perm) {
  require_permutation(frame, perm);
  const auto& multi = frame.multi();
  multi.require_nonclassical("verify_subunit_images");
  Report report;
  report.command = "subunit-images";
  std::vector<std::optional<std::size_t>> image(catalog.size());
  for (std::size_t k = 0; k < catalog.size(); ++k) {
    const auto& label = catalog.label(k);
    const int i = *label.subunit_position();
    bool ok = true;
    for (int x = 0; x < multi.system(i).measurements(); ++x) {
      const auto img = subunit_image(frame, catalog, perm, k, x);
      if (x == 0) image[k] = img;
      ok = ok && img && img == image[k];
    }
    int target = -1;
    if (ok) {
      target = *catalog.label(*image[k]).subunit_position();
      ok = smallest_outcome_count(multi.system(target)) == smallest_outcome_count(multi.system(i));
    }
    auto& rec = report.add("subunit-image", format_label(label), ok);
    if (image[k]) rec.witness = format_label(catalog.label(*image[k]));
    rec.details = {{"unit_system", i + 1}, {"image_unit_system", target < 0 ? nlohmann::json() : nlohmann::json(target + 1)}};
  }

  // The proof's iteration: levels of K_1 in increasing order.
  std::set<int> levels;
  for (const auto& s : multi.systems()) levels.insert(smallest_outcome_count(s));
  for (int r : levels) {
    bool ok = true;
    for (std::size_t k = 0; k < catalog.size(); ++k) {
      const int i = *catalog.label(k).subunit_position();
      if (smallest_outcome_count(multi.system(i)) > r) continue;
      ok = ok && image[k] &&
           smallest_outcome_count(multi.system(*catalog.label(*image[k]).subunit_position())) <= r;
    }
    report.add("subunit-level", "K1<=" + std::to_string(r), ok);
  }
  return report;
}

Report verify_structural_properties(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                const EffectPermutation& perm, const SystemSubset& omega) {
  require_permutation(frame, perm);
  const auto& multi = frame.multi();
  const auto& alphabet = frame.alphabet();
  const int n = multi.size();
  for (int i : omega.systems)
    if (i < 0 || i >= n) throw DimensionError("system subset index out of range");

  for (std::size_t k = 0; k < catalog.size(); ++k) {
    if (!omega.contains(*catalog.label(k).subunit_position())) continue;
    const auto img = subunit_image(frame, catalog, perm, k, 0);
    if (!img || !omega.contains(*catalog.label(*img).subunit_position()))
      throw PreconditionNotMet("transformation does not permute the sub-unit effects at the given systems (" +
                               format_label(catalog.label(k)) + ")");
  }

  Report report;
  report.command = "structural";
  std::string inst = "omega={";
  for (std::size_t k = 0; k < omega.systems.size(); ++k) inst += (k ? "," : "") + std::to_string(omega.systems[k] + 1);
  inst += "}";

  auto agree_outside = [&](std::size_t a, std::size_t b) {
    for (int i = 0; i < n; ++i)
      if (!omega.contains(i) && alphabet.component(a, i) != alphabet.component(b, i)) return false;
    return true;
  };
  std::size_t pairs = 0;
  nlohmann::json counterexample;
  for (std::size_t a = 0; a < perm.size(); ++a)
    for (std::size_t b = a + 1; b < perm.size(); ++b) {
      ++pairs;
      if (agree_outside(a, b) != agree_outside(perm(a), perm(b)) && counterexample.is_null())
        counterexample = labels_json(frame, {a, b});
    }
  auto& pair_rec = report.add("agreement-outside", inst, counterexample.is_null());
  pair_rec.witness = counterexample;
  pair_rec.details = {{"pairs", pairs}};

  std::size_t covers_seen = 0;
  for (std::size_t k = 0; k < catalog.size(); ++k) {
    const int i = *catalog.label(k).subunit_position();
    bool ok = true;
    nlohmann::json bad;
    for (int x = 0; x < multi.system(i).measurements(); ++x) {
      std::vector<std::size_t> images;
      for (auto t : catalog.measurement_decomposition(k, x).terms) images.push_back(perm(t));
      const auto image_set = make_decomposition(images);
      const auto whole = profile_of(frame, image_set);
      for (auto f : covered_subunits(frame, catalog, image_set)) {
        ++covers_seen;
        if (catalog.profile(f) != whole) {
          ok = false;
          if (bad.is_null()) bad = {{"image", labels_json(frame, image_set.terms)}, {"covered", format_label(catalog.label(f))}};
        }
      }
    }
    auto& rec = report.add("cover-image", inst + " " + format_label(catalog.label(k)), ok);
    rec.witness = bad;
  }
  report.summary = {{"pairs", pairs}, {"covers_seen", covers_seen}};
  return report;
}

std::vector<SystemSubset> outcome_levels(const MultiSpec& multi) {
  std::set<int> levels;
  for (const auto& spec : multi.systems()) levels.insert(smallest_outcome_count(spec));
  std::vector<SystemSubset> out;
  for (int r : levels) {
    SystemSubset omega;
    for (int i = 0; i < multi.size(); ++i)
      if (smallest_outcome_count(multi.system(i)) <= r) omega.systems.push_back(i);
    out.push_back(std::move(omega));
  }
  return out;
}

Report verify_transformation_suite(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                   const std::vector<EffectPermutation>& perms) {
  const auto& alphabet = frame.alphabet();
  const int n = frame.multi().size();
  const auto levels = outcome_levels(frame.multi());
  struct Tally {
    std::size_t passed = 0;
    std::optional<std::size_t> first_failure;
    std::string reason;
    void add(std::size_t k, bool ok, std::string why = {}) {
      if (ok) ++passed;
      else if (!first_failure) first_failure = k, reason = std::move(why);
    }
  };
  Tally hamming, images, agreement, covers;
  for (std::size_t k = 0; k < perms.size(); ++k) {
    const auto& p = perms[k];
    bool ham = true;
    for (std::size_t l = 0; l < p.size() && ham; ++l)
      for (int i = 0; i < n && ham; ++i)
        for (int v = alphabet.component(l, i) + 1; v < alphabet.radix(i) && ham; ++v)
          ham = label_distance(alphabet, n, p(l), p(alphabet.with_component(l, i, v))) == 1;
    hamming.add(k, ham);
    images.add(k, verify_subunit_images(frame, catalog, p).passed());
    bool agree = true, cover = true;
    std::string why;
    for (const auto& omega : levels) {
      try {
        const auto r = verify_structural_properties(frame, catalog, p, omega);
        for (const auto& rec : r.records) {
          if (rec.pass) continue;
          (rec.check == "agreement-outside" ? agree : cover) = false;
        }
      } catch (const PreconditionNotMet& e) {
        agree = cover = false;
        why = e.what();
      }
    }
    agreement.add(k, agree, why);
    covers.add(k, cover, why);
  }
  Report report;
  report.command = "transformation-suite";
  auto emit = [&](const char* check, const Tally& t) {
    auto& rec = report.add(check, "all transformations", !t.first_failure);
    rec.details = {{"passed", t.passed}, {"total", perms.size()}};
    if (t.first_failure) {
      nlohmann::json w = {{"index", *t.first_failure}};
      if (!t.reason.empty()) w["reason"] = t.reason;
      rec.witness = w;
    }
  };
  emit("hamming-one", hamming);
  emit("subunit-images", images);
  emit("agreement-outside", agreement);
  emit("cover-image", covers);
  report.summary = {{"transformations", perms.size()}, {"levels", levels.size()}};
  return report;
}

Report verify_classification(const TransformFrame& tf, BudgetMeter& meter) {
  const auto& frame = tf.fiducial();
  const auto& multi = frame.multi();
  multi.require_nonclassical("verify-theorem");
  Report report;
  report.command = "verify-theorem";

  const auto group = generate_trivial_group(frame);
  std::vector<EffectPermutation> trivial;
  for (const auto& e : group) trivial.push_back(e.permutation);
  const auto found = enumerate_reversible(tf, meter);
  report.search_nodes = meter.nodes();

  std::vector<EffectPermutation> only_found, only_trivial;
  std::set_difference(found.begin(), found.end(), trivial.begin(), trivial.end(), std::back_inserter(only_found));
  std::set_difference(trivial.begin(), trivial.end(), found.begin(), found.end(), std::back_inserter(only_trivial));
  auto& eq = report.add("set-equality", "reversible vs trivial", only_found.empty() && only_trivial.empty());
  eq.details = {{"reversible", found.size()}, {"trivial", trivial.size()},
                {"only_reversible", only_found.size()}, {"only_trivial", only_trivial.size()}};
  if (!only_found.empty()) {
    nlohmann::json w = nlohmann::json::array();
    for (std::size_t l = 0; l < frame.label_count(); ++l)
      w.push_back({format_label(frame.alphabet().label(l)), format_label(frame.alphabet().label(only_found.front()(l)))});
    eq.witness = w;
  }

  std::size_t decomposed = 0, swapping = 0, cross_type = 0;
  nlohmann::json undecomposed = nlohmann::json::array();
  for (std::size_t k = 0; k < found.size(); ++k) {
    const auto form = decompose_trivial(frame, found[k]);
    if (!form) {
      if (undecomposed.size() < 5) undecomposed.push_back(k);
      continue;
    }
    ++decomposed;
    if (form->swaps_systems()) ++swapping;
    for (int i = 0; i < multi.size(); ++i)
      if (!same_type(multi.system(i), multi.system(form->system_permutation[i]))) {
        ++cross_type;
        break;
      }
  }
  auto& dec = report.add("trivial-decomposition", "every reversible element", decomposed == found.size());
  if (!undecomposed.empty()) dec.witness = undecomposed;
  dec.details = {{"decomposed", decomposed}};
  report.add("same-type-permutations", "system permutations preserve type", cross_type == 0).details = {
      {"cross_type", cross_type}};

  report.merge(verify_transformation_suite(frame, SubunitCatalog(frame), found));

  report.summary = {{"reversible_found", found.size()},
                    {"trivial_group_size", trivial.size()},
                    {"trivial_group_order", trivial_group_order(multi)},
                    {"match", only_found.empty() && only_trivial.empty()},
                    {"system_swapping", swapping}};
  return report;
}

}  // namespace boxworld
