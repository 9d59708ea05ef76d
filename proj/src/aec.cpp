#include "aecspace/aec.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "aecspace/error.hpp"

namespace aecspace {

std::vector<std::uint32_t> subset_elements(std::uint32_t mask) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; mask >> i; ++i)
    if ((mask >> i) & 1u) out.push_back(i);
  return out;
}

bool ToyAEC::is_strong_subset(std::span<const std::uint32_t> subset, const Structure& n) const {
  if (subset.empty() || !n.is_closed(subset)) return false;
  if (!is_member(n.induced(subset))) return false;
  return strong(subset, n);
}

bool ToyAEC::is_strong_embedding(const Structure& m, const UniverseMap& embedding, const Structure& n) const {
  if (embedding.size() != m.size()) return false;
  std::vector<std::uint32_t> image(embedding.begin(), embedding.end());
  std::sort(image.begin(), image.end());
  if (std::adjacent_find(image.begin(), image.end()) != image.end()) return false;
  if (std::any_of(image.begin(), image.end(), [&](std::uint32_t v) { return v >= n.size(); })) return false;
  if (!n.is_closed(image)) return false;
  // embedding viewed as a map m -> n.induced(image): element i goes to the rank
  // of embedding[i] in the sorted image.
  UniverseMap onto(m.size());
  for (std::uint32_t i = 0; i < m.size(); ++i)
    onto[i] = static_cast<std::uint32_t>(std::lower_bound(image.begin(), image.end(), embedding[i]) - image.begin());
  if (!is_isomorphism(onto, m, n.induced(image))) return false;
  return is_strong_subset(image, n);
}

std::string ToyAEC::describe() const {
  std::ostringstream out;
  out << "class=" << class_name << " strong=" << strong_name << " b=" << block_bound << " cap=" << cap;
  return out.str();
}

// ---------------------------------------------------------------- library

std::vector<std::string> class_library() {
  return {"all-structures", "loopless-symmetric-graphs", "partial-orders"};
}

std::vector<std::string> strong_library() {
  return {"induced-plus-predicate", "induced-substructure", "strictly-smaller"};
}

std::vector<std::string> strong_predicate_library() { return {"upward-closed"}; }

namespace {

std::size_t binary_relation(const Vocabulary& v, const std::map<std::string, std::string>& params,
                            const std::string& fallback, const std::string& who) {
  std::string name = fallback;
  if (auto it = params.find("relation"); it != params.end()) name = it->second;
  if (name.empty()) {
    for (const auto& r : v.relations())
      if (r.arity == 2) {
        name = r.name;
        break;
      }
  }
  const auto r = v.find_relation(name);
  if (!r || v.relations()[*r].arity != 2)
    throw VocabularyError(who + " needs a binary relation" + (name.empty() ? std::string() : " '" + name + "'"));
  return *r;
}

bool loopless_symmetric(const Structure& m, std::size_t r) {
  const auto n = m.size();
  for (std::uint32_t a = 0; a < n; ++a) {
    if (m.holds_code(r, a * n + a)) return false;
    for (std::uint32_t b = a + 1; b < n; ++b)
      if (m.holds_code(r, a * n + b) != m.holds_code(r, b * n + a)) return false;
  }
  return true;
}

bool partial_order(const Structure& m, std::size_t r) {
  const auto n = m.size();
  auto le = [&](std::uint32_t a, std::uint32_t b) { return m.holds_code(r, a * n + b); };
  for (std::uint32_t a = 0; a < n; ++a) {
    if (!le(a, a)) return false;
    for (std::uint32_t b = 0; b < n; ++b) {
      if (a != b && le(a, b) && le(b, a)) return false;
      for (std::uint32_t c = 0; c < n; ++c)
        if (le(a, b) && le(b, c) && !le(a, c)) return false;
    }
  }
  return true;
}

}  // namespace

ToyAEC make_aec(const AecSpec& spec) {
  if (spec.block_bound == 0) throw Error("block bound must be positive");
  if (spec.cap < spec.block_bound) throw Error("universe cap must be at least the block bound");
  ToyAEC a;
  a.vocab = share(spec.vocab);
  a.class_name = spec.class_name;
  a.strong_name = spec.strong_name;
  a.block_bound = spec.block_bound;
  a.cap = spec.cap;

  if (spec.class_name == "all-structures") {
    a.in_class = [](const Structure&) { return true; };
  } else if (spec.class_name == "loopless-symmetric-graphs") {
    const auto r = binary_relation(*a.vocab, spec.params, "", spec.class_name);
    a.in_class = [r](const Structure& m) { return loopless_symmetric(m, r); };
  } else if (spec.class_name == "partial-orders") {
    const auto r = binary_relation(*a.vocab, spec.params, "", spec.class_name);
    a.in_class = [r](const Structure& m) { return partial_order(m, r); };
  } else {
    throw Error("unknown class '" + spec.class_name + "'");
  }

  if (spec.strong_name == "induced-substructure") {
    a.strong = [](std::span<const std::uint32_t>, const Structure&) { return true; };
  } else if (spec.strong_name == "strictly-smaller") {
    a.strong = [](std::span<const std::uint32_t> s, const Structure& n) { return s.size() < n.size(); };
  } else if (spec.strong_name == "induced-plus-predicate") {
    if (spec.strong_predicate == "upward-closed") {
      const auto r = binary_relation(*a.vocab, spec.params, "", "upward-closed");
      a.strong = [r](std::span<const std::uint32_t> s, const Structure& n) {
        for (auto x : s)
          for (std::uint32_t y = 0; y < n.size(); ++y)
            if (n.holds_code(r, x * n.size() + y) && !std::binary_search(s.begin(), s.end(), y)) return false;
        return true;
      };
      a.strong_name += ":upward-closed";
    } else {
      throw Error("unknown strong predicate '" + spec.strong_predicate + "'");
    }
  } else {
    throw Error("unknown strong relation '" + spec.strong_name + "'");
  }
  return a;
}

std::vector<Structure> members(const ToyAEC& a, std::uint32_t size) {
  std::vector<Structure> out;
  if (size == 0) return out;
  for_each_structure(a.vocab, size, [&](const Structure& m) {
    if (a.is_member(m)) out.push_back(m);
    return true;
  });
  return out;
}

// ---------------------------------------------------------------- validation

namespace {

std::string show_subset(std::span<const std::uint32_t> s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

std::vector<std::uint32_t> map_subset(std::span<const std::uint32_t> s, std::span<const std::uint32_t> within) {
  std::vector<std::uint32_t> out;
  out.reserve(s.size());
  for (auto x : s) out.push_back(within[x]);
  return out;
}

class Validator {
 public:
  explicit Validator(const ToyAEC& a) : a_(a) {
    for (std::uint32_t n = 1; n <= a.cap; ++n) by_size_.push_back(members(a, n));
  }

  AecReport run() {
    AecReport r;
    r.checks.push_back(isomorphism_closure());
    r.checks.push_back(reflexivity());
    r.checks.push_back(transitivity());
    r.checks.push_back(coherence());
    r.checks.push_back(lowenheim_skolem());
    r.checks.push_back(chains());
    return r;
  }

 private:
  CheckResult isomorphism_closure() {
    CheckResult c{"isomorphism-closure", true, 0, {}, {}};
    for (std::uint32_t n = 1; n <= a_.cap && c.passed; ++n) {
      UniverseMap sigma = identity_map(n);
      std::vector<UniverseMap> perms;
      do perms.push_back(sigma);
      while (std::next_permutation(sigma.begin(), sigma.end()));
      for_each_structure(a_.vocab, n, [&](const Structure& m) {
        const bool in = a_.is_member(m);
        for (const auto& p : perms) {
          ++c.cases;
          const Structure pm = m.permuted(p);
          if (a_.is_member(pm) != in) {
            c.fail("class membership differs between " + m.signature() + " and its copy " + pm.signature());
            return false;
          }
          if (!in) continue;
          for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            const auto s = subset_elements(mask);
            auto ps = map_subset(s, p);
            std::sort(ps.begin(), ps.end());
            if (a_.is_strong_subset(s, m) != a_.is_strong_subset(ps, pm)) {
              c.fail("strong relation not invariant: " + show_subset(s) + " in " + m.signature());
              return false;
            }
          }
        }
        return true;
      });
    }
    return c;
  }

  CheckResult reflexivity() {
    CheckResult c{"reflexivity", true, 0, {}, {}};
    for (const auto& level : by_size_)
      for (const auto& m : level) {
        ++c.cases;
        const auto all = identity_map(m.size());
        if (!a_.is_strong_subset(all, m)) c.fail(m.signature() + " is not strong in itself");
      }
    return c;
  }

  // For every member N and nested subsets A ⊆ B of N, `visit` sees A, B and the
  // position of A inside the relabelled B.
  template <class Visit>
  void nested_pairs(Visit&& visit) {
    for (const auto& level : by_size_)
      for (const auto& n : level) {
        const std::uint32_t full = (1u << n.size()) - 1;
        for (std::uint32_t bmask = 1; bmask <= full; ++bmask) {
          const auto b = subset_elements(bmask);
          for (std::uint32_t amask = bmask; amask; amask = (amask - 1) & bmask) {
            const auto a = subset_elements(amask);
            std::vector<std::uint32_t> a_in_b;
            for (auto x : a) a_in_b.push_back(static_cast<std::uint32_t>(std::find(b.begin(), b.end(), x) - b.begin()));
            if (!visit(n, a, b, a_in_b)) return;
          }
        }
      }
  }

  CheckResult transitivity() {
    CheckResult c{"transitivity", true, 0, {}, {}};
    nested_pairs([&](const Structure& n, const auto& a, const auto& b, const auto& a_in_b) {
      if (!a_.is_strong_subset(b, n)) return true;
      const Structure nb = n.induced(b);
      if (!a_.is_strong_subset(a_in_b, nb)) return true;
      ++c.cases;
      if (!a_.is_strong_subset(a, n)) {
        c.fail(show_subset(a) + " < " + show_subset(b) + " < " + n.signature() + " but not " + show_subset(a) + " < N");
        return false;
      }
      return true;
    });
    return c;
  }

  CheckResult coherence() {
    CheckResult c{"coherence", true, 0, {}, {}};
    nested_pairs([&](const Structure& p, const auto& a, const auto& b, const auto& a_in_b) {
      if (!a_.is_strong_subset(a, p) || !a_.is_strong_subset(b, p)) return true;
      ++c.cases;
      if (!a_.is_strong_subset(a_in_b, p.induced(b))) {
        c.fail(show_subset(a) + " and " + show_subset(b) + " strong in " + p.signature() + " but not in each other");
        return false;
      }
      return true;
    });
    return c;
  }

  CheckResult lowenheim_skolem() {
    CheckResult c{"lowenheim-skolem", true, 0, {}, {}};
    const auto b = a_.block_bound;
    for (const auto& level : by_size_)
      for (const auto& n : level) {
        const std::uint32_t full = (1u << n.size()) - 1;
        for (std::uint32_t xmask = 0; xmask <= full; ++xmask) {
          if (static_cast<std::uint32_t>(__builtin_popcount(xmask)) > b) continue;
          ++c.cases;
          bool found = false;
          for (std::uint32_t ymask = 1; ymask <= full && !found; ++ymask) {
            if ((ymask & xmask) != xmask || static_cast<std::uint32_t>(__builtin_popcount(ymask)) > b) continue;
            found = a_.is_strong_subset(subset_elements(ymask), n);
          }
          if (!found) {
            c.fail(show_subset(subset_elements(xmask)) + " of " + n.signature() + " has no strong hull of size <= " +
                        std::to_string(b));
            return c;
          }
        }
      }
    return c;
  }

  // Chains S_0 ⊂ S_1 ⊂ … of subsets of P, each strong in the next (relative to
  // P's induced structure). Their union is the last link, so the chain axioms
  // reduce to: the union is a member, every link is strong in the union, and
  // when every link is strong in P so is the union.
  CheckResult chains() {
    CheckResult c{"chain-union", true, 0, {}, {}};
    for (const auto& level : by_size_)
      for (const auto& p : level) {
        const std::uint32_t full = (1u << p.size()) - 1;
        std::vector<std::uint32_t> chain;
        std::function<void()> extend = [&]() {
          if (!c.passed) return;
          if (chain.size() >= 2) check_chain(c, p, chain);
          const std::uint32_t last = chain.empty() ? 0 : chain.back();
          for (std::uint32_t next = 1; next <= full; ++next) {
            if ((next & last) != last || next == last) continue;
            if (!chain.empty() && !link_strong(p, last, next)) continue;
            if (chain.empty() && !p.is_closed(subset_elements(next))) continue;
            if (!a_.is_member(p.induced(subset_elements(next)))) continue;
            chain.push_back(next);
            extend();
            chain.pop_back();
          }
        };
        extend();
      }
    return c;
  }

  bool link_strong(const Structure& p, std::uint32_t inner, std::uint32_t outer) const {
    const auto o = subset_elements(outer);
    if (!p.is_closed(o)) return false;
    std::vector<std::uint32_t> pos;
    for (auto x : subset_elements(inner))
      pos.push_back(static_cast<std::uint32_t>(std::find(o.begin(), o.end(), x) - o.begin()));
    return a_.is_strong_subset(pos, p.induced(o));
  }

  void check_chain(CheckResult& c, const Structure& p, const std::vector<std::uint32_t>& chain) {
    ++c.cases;
    const std::uint32_t top = chain.back();
    const auto u = subset_elements(top);
    if (!a_.is_member(p.induced(u))) {
      c.fail("union " + show_subset(u) + " of a chain in " + p.signature() + " is not a member");
      return;
    }
    bool all_in_p = true;
    for (auto link : chain) {
      if (link != top && !link_strong(p, link, top))
        c.fail("link " + show_subset(subset_elements(link)) + " not strong in chain union " + show_subset(u));
      all_in_p = all_in_p && a_.is_strong_subset(subset_elements(link), p);
    }
    if (all_in_p && !a_.is_strong_subset(u, p))
      c.fail("links strong in " + p.signature() + " but union " + show_subset(u) + " is not");
  }

  const ToyAEC& a_;
  std::vector<std::vector<Structure>> by_size_;
};

}  // namespace

AecReport validate_aec(const ToyAEC& a) {
  if (a.cap > 8) throw BudgetExceeded("universe cap above 8 is outside the exhaustive range");
  return Validator(a).run();
}

}  // namespace aecspace
