#include <boxworld/decomposition.hpp>
#include <boxworld/errors.hpp>
#include <boxworld/label_text.hpp>

#include <algorithm>
#include <set>

namespace boxworld {

Decomposition make_decomposition(std::vector<std::size_t> terms) {
  std::sort(terms.begin(), terms.end());
  return Decomposition{std::move(terms)};
}

std::vector<JointEffectLabel> labels_of(const FiducialFrame& frame, const Decomposition& d) {
  std::vector<JointEffectLabel> out;
  out.reserve(d.terms.size());
  for (auto t : d.terms) out.push_back(frame.alphabet().label(t));
  return out;
}

std::vector<JointEffectLabel> subunit_labels(const MultiSpec& multi) {
  FiducialAlphabet alphabet(multi);
  std::vector<JointEffectLabel> out;
  for (int i = 0; i < multi.size(); ++i) {
    std::set<JointEffectLabel> seen;
    for (std::size_t l = 0; l < alphabet.size(); ++l) {
      auto label = alphabet.label(l);
      label.components[i] = LocalEffectLabel::unit();
      if (seen.insert(label).second) out.push_back(label);
    }
  }
  return out;
}

std::optional<Profile> integer_profile(const FiducialFrame& frame, const EffectVector& e) {
  Profile out;
  out.reserve(frame.state_count());
  for (const auto& q : frame.profile(e)) {
    if (!is_integral(q)) return std::nullopt;
    out.push_back(static_cast<int>(boost::multiprecision::numerator(q).convert_to<long>()));
  }
  return out;
}

Profile profile_of(const FiducialFrame& frame, const Decomposition& d) {
  Profile out(frame.state_count(), 0);
  for (auto t : d.terms)
    for (std::size_t s = 0; s < out.size(); ++s) out[s] += frame.hit(t, s);
  return out;
}

SubunitCatalog::SubunitCatalog(const FiducialFrame& frame)
    : frame_(&frame), labels_(subunit_labels(frame.multi())) {
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    auto p = integer_profile(frame, joint_effect_vector(frame.multi(), labels_[k]));
    if (!p) throw ConstructionBug("sub-unit effect has a non-integer profile");
    index_.emplace(*p, k);
    profiles_.push_back(std::move(*p));
  }
}

Decomposition SubunitCatalog::measurement_decomposition(std::size_t k, int measurement) const {
  const auto& label = labels_.at(k);
  const int i = *label.subunit_position();
  std::vector<std::size_t> terms;
  for (int a = 0; a < frame_->multi().system(i).outcomes(measurement); ++a) {
    auto l = label;
    l.components[i] = LocalEffectLabel::fiducial(measurement, a);
    terms.push_back(frame_->alphabet().index(l));
  }
  return make_decomposition(std::move(terms));
}

std::optional<std::size_t> SubunitCatalog::find(const Profile& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<SubUnitDescriptor> SubunitCatalog::classify(const EffectVector& e) const {
  auto p = integer_profile(*frame_, e);
  if (!p) return std::nullopt;
  auto k = find(*p);
  if (!k) return std::nullopt;
  return SubUnitDescriptor{*labels_[*k].subunit_position(), labels_[*k]};
}

std::size_t decomposition_size_bound(const FiducialFrame& frame, const EffectVector& e) {
  const auto& multi = frame.multi();
  Rational scale = 1;
  for (const auto& s : multi.systems())
    scale *= *std::max_element(s.outcome_counts().begin(), s.outcome_counts().end());
  const Rational bound = evaluate(e, maximally_mixed_state(multi)) * scale;
  if (bound < 0) return 0;
  const Integer floor = boost::multiprecision::numerator(bound) / boost::multiprecision::denominator(bound);
  return floor.convert_to<std::size_t>();
}

namespace {

class DecompositionSearch {
 public:
  DecompositionSearch(const FiducialFrame& frame, Profile target, std::size_t bound, BudgetMeter& meter,
                      std::size_t stop_after = 0)
      : frame_(frame), residual_(std::move(target)), bound_(bound), meter_(meter), stop_after_(stop_after) {
    supports_.resize(frame.label_count());
    for (std::size_t l = 0; l < frame.label_count(); ++l)
      for (std::size_t s = 0; s < frame.state_count(); ++s)
        if (frame.hit(l, s)) supports_[l].push_back(s);
    for (int v : residual_) remaining_ += v;
  }

  std::vector<Decomposition> run() {
    dfs(0);
    return std::move(found_);
  }

 private:
  bool fits(std::size_t label) const {
    for (auto s : supports_[label])
      if (residual_[s] == 0) return false;
    return true;
  }

  void dfs(std::size_t start) {
    meter_.count_nodes();
    if (remaining_ == 0) {
      found_.push_back(Decomposition{current_});
      return;
    }
    if (current_.size() >= bound_) return;
    for (std::size_t l = start; l < supports_.size(); ++l) {
      if (stop_after_ && found_.size() >= stop_after_) return;
      if (!fits(l)) continue;
      for (auto s : supports_[l]) --residual_[s];
      remaining_ -= static_cast<long>(supports_[l].size());
      current_.push_back(l);
      dfs(l);
      current_.pop_back();
      remaining_ += static_cast<long>(supports_[l].size());
      for (auto s : supports_[l]) ++residual_[s];
    }
  }

  const FiducialFrame& frame_;
  Profile residual_;
  long remaining_ = 0;
  std::size_t bound_;
  BudgetMeter& meter_;
  std::size_t stop_after_;
  std::vector<std::vector<std::size_t>> supports_;
  std::vector<std::size_t> current_;
  std::vector<Decomposition> found_;
};

std::vector<Decomposition> search(const FiducialFrame& frame, const EffectVector& e, BudgetMeter& meter,
                                  std::size_t stop_after) {
  if (e.coords.size() != frame.multi().joint_dimension()) throw DimensionError("effect dimension mismatch");
  auto target = integer_profile(frame, e);
  if (!target || std::any_of(target->begin(), target->end(), [](int v) { return v < 0; }))
    throw NotInCone("effect is not a nonnegative integer combination of fiducial effects");
  auto found = DecompositionSearch(frame, *target, decomposition_size_bound(frame, e), meter, stop_after).run();
  if (found.empty()) throw NotInCone("effect has no decomposition into fiducial effects");
  for (const auto& d : found)
    if (!(frame.sum(d.terms) == e)) throw ConstructionBug("decomposition does not sum to its effect");
  return found;
}

std::string describe(const FiducialFrame& frame, const Decomposition& d) {
  std::string out = "{";
  for (std::size_t k = 0; k < d.terms.size(); ++k) {
    if (k) out += "; ";
    out += format_label(frame.alphabet().label(d.terms[k]));
  }
  return out + "}";
}

nlohmann::json describe_all(const FiducialFrame& frame, const std::vector<Decomposition>& ds) {
  auto out = nlohmann::json::array();
  for (const auto& d : ds) out.push_back(describe(frame, d));
  return out;
}

EffectVector sum_of_mask(const FiducialFrame& frame, const Decomposition& d, unsigned long mask) {
  EffectVector s = zero_effect(frame.multi());
  for (std::size_t k = 0; k < d.terms.size(); ++k)
    if (mask >> k & 1UL) s.coords += frame.vector(d.terms[k]).coords;
  return s;
}

void require_small(const Decomposition& d) {
  if (d.terms.size() > 24) throw ResourceBudgetExceeded("sub-multiset enumeration limited to 24 terms");
}

}  // namespace

std::vector<Decomposition> enumerate_decompositions(const FiducialFrame& frame, const EffectVector& e,
                                                    BudgetMeter& meter) {
  return search(frame, e, meter, 0);
}

std::vector<Decomposition> enumerate_decompositions(const FiducialFrame& frame, const EffectVector& e) {
  BudgetMeter meter;
  return enumerate_decompositions(frame, e, meter);
}

bool is_multiform(const FiducialFrame& frame, const EffectVector& e, BudgetMeter& meter) {
  return search(frame, e, meter, 2).size() >= 2;
}

bool is_multiform(const FiducialFrame& frame, const EffectVector& e) {
  BudgetMeter meter;
  return is_multiform(frame, e, meter);
}

std::optional<SubUnitDescriptor> classify_subunit(const FiducialFrame& frame, const EffectVector& e) {
  return SubunitCatalog(frame).classify(e);
}

bool covers(const FiducialFrame& frame, const Decomposition& terms, const EffectVector& f, bool strict) {
  require_small(terms);
  const unsigned long full = (1UL << terms.terms.size()) - 1;
  for (unsigned long mask = 0; mask <= full; ++mask) {
    if (strict && mask == full) break;
    if (sum_of_mask(frame, terms, mask) == f) return true;
  }
  return false;
}

std::vector<std::size_t> covered_subunits(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                          const Decomposition& terms, bool strict) {
  require_small(terms);
  std::set<std::size_t> found;
  const unsigned long full = (1UL << terms.terms.size()) - 1;
  for (unsigned long mask = 1; mask <= full; ++mask) {
    if (strict && mask == full) break;
    Profile p(frame.state_count(), 0);
    for (std::size_t k = 0; k < terms.terms.size(); ++k)
      if (mask >> k & 1UL)
        for (std::size_t s = 0; s < p.size(); ++s) p[s] += frame.hit(terms.terms[k], s);
    if (auto idx = catalog.find(p)) found.insert(*idx);
  }
  return {found.begin(), found.end()};
}

Report verify_subunit_decompositions(const FiducialFrame& frame, BudgetMeter& meter) {
  const auto& multi = frame.multi();
  multi.require_nonclassical("verify-lemma1");
  Report report;
  report.command = "verify-lemma1";
  SubunitCatalog catalog(frame);
  std::map<Profile, bool> multiform_memo;
  std::size_t decompositions = 0, submultisets = 0;
  bool repeated = false;

  for (std::size_t k = 0; k < catalog.size(); ++k) {
    const auto& label = catalog.label(k);
    const int i = *label.subunit_position();
    const auto e = joint_effect_vector(multi, label);
    const auto ds = enumerate_decompositions(frame, e, meter);
    decompositions += ds.size();

    bool decomposition_ok = static_cast<int>(ds.size()) == multi.system(i).measurements();
    nlohmann::json bad = nullptr;
    std::set<int> measurements_seen;
    for (const auto& d : ds) {
      std::vector<int> outcomes;
      std::set<int> meas;
      bool off_unit_ok = true;
      for (auto t : d.terms) {
        const auto tl = frame.alphabet().label(t);
        for (int j = 0; j < multi.size(); ++j)
          if (j != i && !(tl.components[j] == label.components[j])) off_unit_ok = false;
        meas.insert(tl.components[i].measurement);
        outcomes.push_back(tl.components[i].outcome);
      }
      std::sort(outcomes.begin(), outcomes.end());
      if (std::adjacent_find(outcomes.begin(), outcomes.end()) != outcomes.end()) repeated = true;
      bool full_measurement = meas.size() == 1;
      if (full_measurement) {
        const int x = *meas.begin();
        measurements_seen.insert(x);
        full_measurement = static_cast<int>(outcomes.size()) == multi.system(i).outcomes(x);
        for (std::size_t a = 0; full_measurement && a < outcomes.size(); ++a)
          full_measurement = outcomes[a] == static_cast<int>(a);
      }
      if (!off_unit_ok || !full_measurement) {
        decomposition_ok = false;
        if (bad.is_null()) bad = describe(frame, d);
      }
    }
    decomposition_ok = decomposition_ok && static_cast<int>(measurements_seen.size()) == multi.system(i).measurements();
    auto& rec = report.add("subunit-decomposition", format_label(label), decomposition_ok);
    rec.details = {{"decompositions", ds.size()}};
    if (!decomposition_ok) rec.witness = bad.is_null() ? describe_all(frame, ds) : bad;

    // No strict sub-multiset of a decomposition sums to a multiform effect.
    bool strict_ok = true;
    nlohmann::json strict_witness = nullptr;
    for (const auto& d : ds) {
      require_small(d);
      const unsigned long full = (1UL << d.terms.size()) - 1;
      for (unsigned long mask = 1; mask < full; ++mask) {
        ++submultisets;
        Decomposition sub;
        for (std::size_t t = 0; t < d.terms.size(); ++t)
          if (mask >> t & 1UL) sub.terms.push_back(d.terms[t]);
        const Profile p = profile_of(frame, sub);
        auto it = multiform_memo.find(p);
        if (it == multiform_memo.end())
          it = multiform_memo.emplace(p, is_multiform(frame, frame.sum(sub.terms), meter)).first;
        if (it->second) {
          strict_ok = false;
          if (strict_witness.is_null()) strict_witness = describe(frame, sub);
        }
      }
    }
    auto& crec = report.add("strict-submultiset", format_label(label), strict_ok);
    if (!strict_ok) crec.witness = strict_witness;
  }
  report.summary = {{"subunit_effects", catalog.size()},
                    {"decompositions", decompositions},
                    {"strict_submultisets", submultisets},
                    {"repeated_terms_seen", repeated}};
  report.search_nodes = meter.nodes();
  return report;
}

Report verify_small_sums(const FiducialFrame& frame, BudgetMeter& meter) {
  const auto& multi = frame.multi();
  multi.require_nonclassical("verify-cor2");
  if (!is_canonical(multi)) throw PreconditionNotMet("verify-cor2 requires a canonically sorted system");
  Report report;
  report.command = "verify-cor2";
  SubunitCatalog catalog(frame);
  const std::size_t r = static_cast<std::size_t>(multi.min_first_outcomes());
  const std::size_t n = frame.label_count();

  // Every multiset of exactly r labels, grouped by sum.
  std::map<Profile, std::vector<Decomposition>> groups;
  std::vector<std::size_t> idx(r, 0);
  std::size_t multisets = 0;
  while (true) {
    meter.count_nodes();
    Decomposition d{idx};
    groups[profile_of(frame, d)].push_back(d);
    ++multisets;
    std::size_t k = r;
    while (k > 0 && idx[k - 1] == n - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < r; ++j) idx[j] = idx[k - 1];
  }

  std::set<std::size_t> multiform_subunits;
  std::size_t multiform_sums = 0;
  for (const auto& [profile, members] : groups) {
    bool multiform = members.size() >= 2;
    if (!multiform) multiform = is_multiform(frame, frame.sum(members.front().terms), meter);
    if (!multiform) continue;
    ++multiform_sums;
    auto sub = catalog.find(profile);
    if (sub) multiform_subunits.insert(*sub);
    auto& rec = report.add("small-sum", sub ? format_label(catalog.label(*sub)) : describe(frame, members.front()),
                           sub.has_value());
    if (!sub) rec.witness = describe_all(frame, members);
  }

  std::set<std::size_t> predicted;
  for (std::size_t k = 0; k < catalog.size(); ++k) {
    const int i = *catalog.label(k).subunit_position();
    if (static_cast<std::size_t>(multi.system(i).outcomes(0)) == r) predicted.insert(k);
  }
  const bool match = predicted == multiform_subunits && multiform_sums == predicted.size();
  auto& rec = report.add("small-sum-predicted-set", "K1=" + std::to_string(r), match);
  rec.details = {{"predicted", predicted.size()}, {"multiform_sums", multiform_sums}};
  report.summary = {{"multiset_size", r},
                    {"multisets", multisets},
                    {"distinct_sums", groups.size()},
                    {"multiform_sums", multiform_sums},
                    {"predicted_subunits", predicted.size()}};
  report.search_nodes = meter.nodes();
  return report;
}

}  // namespace boxworld
