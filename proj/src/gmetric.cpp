#include "aecspace/gmetric.hpp"

#include <algorithm>

#include "aecspace/error.hpp"

namespace aecspace {

GroupElement::GroupElement(std::uint32_t degree, const std::vector<std::pair<std::uint32_t, std::int64_t>>& support)
    : entries_(degree, 0) {
  for (const auto& [i, v] : support) {
    if (i >= degree) throw Error("support index " + std::to_string(i) + " outside degree " + std::to_string(degree));
    entries_[i] += v;
  }
}

GroupElement GroupElement::unit(std::uint32_t degree, std::uint32_t alpha) {
  if (alpha >= degree) throw Error("r_" + std::to_string(alpha) + " does not exist below degree " + std::to_string(degree));
  GroupElement g(degree);
  g.entries_[alpha] = 1;
  return g;
}

bool GroupElement::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](std::int64_t v) { return v == 0; });
}

std::optional<std::uint32_t> GroupElement::leading_index() const {
  for (std::uint32_t i = 0; i < entries_.size(); ++i)
    if (entries_[i] != 0) return i;
  return std::nullopt;
}

bool GroupElement::is_positive() const {
  const auto i = leading_index();
  return i && entries_[*i] > 0;
}

void GroupElement::require_same_degree(const GroupElement& other) const {
  if (degree() != other.degree())
    throw Error("degree mismatch: " + std::to_string(degree()) + " vs " + std::to_string(other.degree()));
}

GroupElement GroupElement::operator+(const GroupElement& other) const {
  require_same_degree(other);
  GroupElement out = *this;
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] += other.entries_[i];
  return out;
}

GroupElement GroupElement::operator-() const {
  GroupElement out = *this;
  for (auto& v : out.entries_) v = -v;
  return out;
}

GroupElement GroupElement::operator-(const GroupElement& other) const { return *this + (-other); }

std::strong_ordering GroupElement::operator<=>(const GroupElement& other) const {
  require_same_degree(other);
  return entries_ <=> other.entries_;
}

bool GroupElement::operator==(const GroupElement& other) const {
  require_same_degree(other);
  return entries_ == other.entries_;
}

std::string GroupElement::text() const {
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i] != 0) out += (out.empty() ? "" : ",") + std::to_string(i) + ":" + std::to_string(entries_[i]);
  return out.empty() ? "0" : out;
}

GroupElement coinitial(std::uint32_t degree, std::uint32_t alpha) { return GroupElement::unit(degree, alpha); }

std::string sequence_text(const Sequence& x) {
  std::string out;
  for (auto d : x) out += std::to_string(d);
  return out;
}

GroupElement first_difference_metric(const Sequence& x, const Sequence& y, std::uint32_t degree) {
  if (x.size() != y.size()) throw Error("sequences of lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  if (x.size() > degree) throw Error("sequence length " + std::to_string(x.size()) + " above degree " + std::to_string(degree));
  const auto [ix, iy] = std::mismatch(x.begin(), x.end(), y.begin());
  if (ix == x.end()) return GroupElement::zero(degree);
  return GroupElement::unit(degree, static_cast<std::uint32_t>(ix - x.begin()));
}

bool BallDescriptor::contains(const Sequence& y) const {
  return y.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), y.begin());
}

std::string BallDescriptor::text() const { return prefix.empty() ? "all" : "cylinder " + sequence_text(prefix); }

BallDescriptor ball(const Sequence& x, const GroupElement& epsilon) {
  if (!epsilon.is_positive()) throw Error("ball radius must be positive, got " + epsilon.text());
  const auto degree = epsilon.degree();
  if (x.size() > degree) throw Error("sequence longer than the degree");
  // d(x,y) < ε iff the first disagreement lies at or beyond the least α with
  // r_α < ε. When no r_α is that small only x itself qualifies.
  std::uint32_t alpha = degree;
  for (std::uint32_t a = 0; a < degree; ++a)
    if (GroupElement::unit(degree, a) < epsilon) {
      alpha = a;
      break;
    }
  const auto keep = std::min<std::size_t>(alpha, x.size());
  return BallDescriptor{Sequence(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(keep))};
}

const Sequence& SequenceFamily::at(std::uint64_t beta) const {
  if (beta < head.size()) return head[beta];
  return cycle[(beta - head.size()) % cycle.size()];
}

CauchyVerdict cauchy_and_limit(const SequenceFamily& family, std::uint32_t degree) {
  if (family.cycle.empty()) throw Error("a family needs a non-empty cycle");
  const auto length = family.cycle.front().size();
  for (std::uint64_t b = 0; b < family.head.size() + family.cycle.size(); ++b)
    if (family.at(b).size() != length) throw Error("family points differ in length");
  if (length > degree) throw Error("sequence longer than the degree");

  // Beyond the head the family is periodic, so the tail from any index past
  // the head contains the same points; thresholds above head.size() add nothing.
  const std::uint64_t horizon = family.head.size() + family.cycle.size();
  CauchyVerdict out;
  out.is_cauchy = true;
  for (std::uint32_t alpha = 0; alpha < degree; ++alpha) {
    const auto r = GroupElement::unit(degree, alpha);
    std::optional<std::uint64_t> threshold;
    for (std::uint64_t start = 0; start <= family.head.size() && !threshold; ++start) {
      bool close = true;
      for (std::uint64_t b = start; b < horizon && close; ++b)
        for (std::uint64_t c = b + 1; c < horizon && close; ++c)
          close = first_difference_metric(family.at(b), family.at(c), degree) < r;
      if (close) threshold = start;
    }
    out.thresholds.push_back(threshold);
    out.is_cauchy = out.is_cauchy && threshold.has_value();
  }
  if (out.is_cauchy) {
    // Coordinate i settles on the value it takes throughout the cycle.
    Sequence limit(length);
    for (std::size_t i = 0; i < length; ++i) limit[i] = family.cycle.front()[i];
    out.limit = limit;
  }
  return out;
}

namespace {

std::vector<Sequence> all_sequences(std::uint32_t alphabet, std::uint32_t length) {
  std::vector<Sequence> out;
  Sequence cur(length, 0);
  while (true) {
    out.push_back(cur);
    std::size_t k = length;
    while (k > 0 && ++cur[k - 1] == alphabet) cur[--k] = 0;
    if (k == 0) break;
  }
  return out;
}

}  // namespace

Report verify_metric(std::uint32_t alphabet, std::uint32_t max_length, std::uint32_t degree) {
  if (alphabet == 0 || max_length > degree) throw Error("metric sweep needs a non-empty alphabet and length within degree");
  CheckResult identity{"identity", true, 0, {}, {}}, symmetry{"symmetry", true, 0, {}, {}},
      triangle{"triangle", true, 0, {}, {}}, ultra{"ultrametric", true, 0, {}, {}},
      balls{"ball-cylinder", true, 0, {}, {}};
  const auto zero = GroupElement::zero(degree);

  std::vector<GroupElement> radii;
  for (std::uint32_t a = 0; a < degree; ++a) radii.push_back(GroupElement::unit(degree, a));
  for (std::uint32_t a = 0; a + 1 < degree; ++a)
    radii.push_back(GroupElement::unit(degree, a) - GroupElement::unit(degree, a + 1));
  radii.push_back(GroupElement::unit(degree, 0) + GroupElement::unit(degree, 0));

  for (std::uint32_t length = 1; length <= max_length; ++length) {
    const auto points = all_sequences(alphabet, length);
    const std::size_t n = points.size();
    std::vector<GroupElement> d;
    d.reserve(n * n);
    for (const auto& x : points)
      for (const auto& y : points) d.push_back(first_difference_metric(x, y, degree));
    auto dist = [&](std::size_t i, std::size_t j) -> const GroupElement& { return d[i * n + j]; };
    auto pair = [&](std::size_t i, std::size_t j) { return sequence_text(points[i]) + "," + sequence_text(points[j]); };

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        ++identity.cases;
        ++symmetry.cases;
        if (dist(i, j) < zero || (dist(i, j) == zero) != (i == j)) identity.fail(pair(i, j));
        if (dist(i, j) != dist(j, i)) symmetry.fail(pair(i, j));
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          ++triangle.cases;
          ++ultra.cases;
          const auto& xz = dist(i, k);
          const auto& bigger = std::max(dist(i, j), dist(j, k));
          if (!(xz <= dist(i, j) + dist(j, k))) triangle.fail(pair(i, j) + "," + sequence_text(points[k]));
          if (!(xz <= bigger)) ultra.fail(pair(i, j) + "," + sequence_text(points[k]));
        }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < radii.size(); ++r) {
        const auto b = ball(points[i], radii[r]);
        // r_α must give exactly the cylinder through the first α+1 coordinates.
        if (r < degree) {
          const auto keep = std::min<std::size_t>(r + 1, length);
          if (b.prefix != Sequence(points[i].begin(), points[i].begin() + static_cast<std::ptrdiff_t>(keep)))
            balls.fail("B(" + sequence_text(points[i]) + ", r_" + std::to_string(r) + ") is " + b.text());
        }
        for (std::size_t j = 0; j < n; ++j) {
          ++balls.cases;
          if ((dist(i, j) < radii[r]) != b.contains(points[j]))
            balls.fail("B(" + sequence_text(points[i]) + ", " + radii[r].text() + ") at " + sequence_text(points[j]));
        }
      }
  }
  Report report;
  report.checks = {identity, symmetry, triangle, ultra, balls};
  return report;
}

Report verify_group(std::uint32_t degree, std::uint32_t support, std::int64_t bound) {
  if (support > degree) throw Error("support wider than the degree");
  std::vector<GroupElement> grid;
  {
    std::vector<std::int64_t> cur(support, -bound);
    while (true) {
      std::vector<std::pair<std::uint32_t, std::int64_t>> entries;
      for (std::uint32_t i = 0; i < support; ++i) entries.emplace_back(i, cur[i]);
      grid.emplace_back(degree, entries);
      std::size_t k = support;
      while (k > 0 && ++cur[k - 1] > bound) cur[--k] = -bound;
      if (k == 0) break;
    }
  }
  const auto zero = GroupElement::zero(degree);
  CheckResult assoc{"associativity", true, 0, {}, {}}, comm{"commutativity", true, 0, {}, {}},
      neutral{"neutral", true, 0, {}, {}}, inverses{"inverses", true, 0, {}, {}},
      total{"total-order", true, 0, {}, {}}, invariant{"translation-invariance", true, 0, {}, {}},
      units{"units-decreasing", true, 0, {}, {}}, coinit{"coinitiality", true, 0, {}, {}};

  for (const auto& a : grid) {
    ++neutral.cases;
    ++inverses.cases;
    if (a + zero != a || zero + a != a) neutral.fail(a.text());
    if (a + (-a) != zero || a - a != zero) inverses.fail(a.text());
    ++coinit.cases;
    if (a.is_positive() && *a.leading_index() + 1 < degree && !(GroupElement::unit(degree, *a.leading_index() + 1) < a))
      coinit.fail(a.text());
  }
  for (const auto& a : grid)
    for (const auto& b : grid) {
      ++comm.cases;
      ++total.cases;
      if (a + b != b + a) comm.fail(a.text() + " + " + b.text());
      const int relations = (a < b) + (a == b) + (b < a);
      if (relations != 1) total.fail(a.text() + " vs " + b.text());
      for (const auto& c : grid) {
        ++assoc.cases;
        ++invariant.cases;
        if ((a + b) + c != a + (b + c)) assoc.fail(a.text() + ", " + b.text() + ", " + c.text());
        if (a < b && !(a + c < b + c)) invariant.fail(a.text() + " < " + b.text() + " shifted by " + c.text());
      }
    }
  for (std::uint32_t a = 0; a < degree; ++a) {
    ++units.cases;
    const auto r = GroupElement::unit(degree, a);
    if (!(zero < r)) units.fail("r_" + std::to_string(a) + " not positive");
    if (a + 1 < degree && !(GroupElement::unit(degree, a + 1) < r)) units.fail("r_" + std::to_string(a + 1) + " >= r_" + std::to_string(a));
  }
  Report report;
  report.checks = {assoc, comm, neutral, inverses, total, invariant, units, coinit};
  return report;
}

Report cauchy_demos(std::uint32_t alphabet, std::uint32_t length, std::uint32_t degree) {
  if (alphabet < 2 || length == 0 || length > degree) throw Error("Cauchy demos need two letters and 0 < length <= degree");
  const Sequence p(length, 0);
  Sequence q = p;
  q[0] = 1;
  Sequence target(length);
  for (std::uint32_t i = 0; i < length; ++i) target[i] = (i + 1) % alphabet;

  CheckResult constant{"cauchy-constant", true, 1, {}, {}};
  {
    const auto v = cauchy_and_limit({{q, p, q}, {p}}, degree);
    if (!v.is_cauchy || v.limit != p) constant.fail("eventually constant family rejected");
  }
  CheckResult alternating{"cauchy-alternating", true, 1, {}, {}};
  {
    const auto v = cauchy_and_limit({{}, {p, q}}, degree);
    if (v.is_cauchy) alternating.fail("alternating family accepted");
    else if (v.thresholds.front().has_value()) alternating.fail("r_0 should refute the alternating family");
  }
  CheckResult converging{"cauchy-converging", true, 0, {}, {}};
  {
    // Point k agrees with the target on exactly its first k coordinates.
    SequenceFamily fam;
    for (std::uint32_t k = 0; k < length; ++k) {
      Sequence x = target;
      for (std::uint32_t i = k; i < length; ++i) x[i] = (target[i] + 1) % alphabet;
      fam.head.push_back(x);
    }
    fam.cycle = {target};
    const auto v = cauchy_and_limit(fam, degree);
    if (!v.is_cauchy || v.limit != target) converging.fail("converging family rejected");
    for (std::uint32_t a = 0; a < degree; ++a) {
      ++converging.cases;
      const std::uint64_t expected = std::min<std::uint64_t>(a + 1, length);
      if (v.thresholds[a] != expected)
        converging.fail("threshold for r_" + std::to_string(a) + " is not " + std::to_string(expected));
    }
  }
  Report report;
  report.checks = {constant, alternating, converging};
  return report;
}

}  // namespace aecspace
