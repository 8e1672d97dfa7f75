#include "chainreb/farber.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace chainreb {

Word Word::parse(const std::string& text) {
    Word w;
    std::stringstream ss(text);
    std::string tok;
    while (ss >> tok) {
        Letter l;
        if (!tok.empty() && tok.back() == '\'') {
            l.inverse = true;
            tok.pop_back();
        }
        l.name = tok;
        if (l.name.empty()) throw parse_error("empty generator name in word");
        w.letters.push_back(std::move(l));
    }
    return w;
}

std::string Word::str() const {
    std::string out;
    for (const auto& l : letters) {
        if (!out.empty()) out += ' ';
        out += l.name;
        if (l.inverse) out += '\'';
    }
    return out;
}

PermutationAction::PermutationAction(index_t degree,
                                     std::vector<std::pair<std::string, std::vector<index_t>>> gens)
    : degree_(degree) {
    if (degree < 1) throw shape_error("action degree must be positive");
    for (auto& [name, image] : gens) {
        if (static_cast<index_t>(image.size()) != degree)
            throw shape_error("generator image size mismatch for " + name);
        std::vector<bool> seen(static_cast<std::size_t>(degree), false);
        for (index_t v : image) {
            if (v < 0 || v >= degree || seen[static_cast<std::size_t>(v)])
                throw shape_error("generator " + name + " is not a bijection");
            seen[static_cast<std::size_t>(v)] = true;
        }
        std::vector<index_t> inv(static_cast<std::size_t>(degree));
        for (index_t i = 0; i < degree; ++i) inv[static_cast<std::size_t>(image[static_cast<std::size_t>(i)])] = i;
        names_.push_back(name);
        images_.push_back(std::move(image));
        inverses_.push_back(std::move(inv));
    }
    // transitivity: the modeled coset actions are connected
    std::vector<index_t> labels = orbit_labels(names_);
    for (index_t l : labels)
        if (l != labels[0]) throw shape_error("action is not transitive");
}

index_t PermutationAction::gen_index(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<index_t>(i);
    throw shape_error("unknown generator: " + name);
}

index_t PermutationAction::act(const Word& w, index_t point) const {
    index_t at = point;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        index_t g = gen_index(it->name);
        at = it->inverse ? inverses_[static_cast<std::size_t>(g)][static_cast<std::size_t>(at)]
                         : images_[static_cast<std::size_t>(g)][static_cast<std::size_t>(at)];
    }
    return at;
}

std::vector<index_t> PermutationAction::permutation_of(const Word& w) const {
    std::vector<index_t> out(static_cast<std::size_t>(degree_));
    for (index_t i = 0; i < degree_; ++i) out[static_cast<std::size_t>(i)] = act(w, i);
    return out;
}

std::vector<index_t> PermutationAction::orbit_labels(const std::vector<std::string>& sub_generators) const {
    std::vector<index_t> label(static_cast<std::size_t>(degree_), -1);
    index_t next = 0;
    std::vector<index_t> stack;
    for (index_t start = 0; start < degree_; ++start) {
        if (label[static_cast<std::size_t>(start)] != -1) continue;
        label[static_cast<std::size_t>(start)] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            index_t at = stack.back();
            stack.pop_back();
            for (const std::string& name : sub_generators) {
                index_t g = gen_index(name);
                for (const auto& table : {images_[static_cast<std::size_t>(g)],
                                          inverses_[static_cast<std::size_t>(g)]}) {
                    index_t to = table[static_cast<std::size_t>(at)];
                    if (label[static_cast<std::size_t>(to)] == -1) {
                        label[static_cast<std::size_t>(to)] = next;
                        stack.push_back(to);
                    }
                }
            }
        }
        ++next;
    }
    return label;
}

void PermutationAction::write(std::ostream& os) const {
    os << "degree " << degree_ << '\n';
    for (std::size_t g = 0; g < names_.size(); ++g) {
        os << "gen " << names_[g] << ':';
        for (index_t v : images_[g]) os << ' ' << v;
        os << '\n';
    }
}

PermutationAction PermutationAction::read(std::istream& is) {
    std::string line;
    index_t degree = -1;
    std::vector<std::pair<std::string, std::vector<index_t>>> gens;
    while (std::getline(is, line)) {
        std::stringstream ss(line);
        std::string word;
        if (!(ss >> word) || word[0] == '#') continue;
        if (word == "degree") {
            ss >> degree;
        } else if (word == "gen") {
            std::string name;
            ss >> name;
            if (!name.empty() && name.back() == ':') name.pop_back();
            std::vector<index_t> image;
            index_t v;
            while (ss >> v) image.push_back(v);
            gens.emplace_back(name, std::move(image));
        } else {
            throw parse_error("unknown action directive " + word);
        }
    }
    if (degree < 1) throw parse_error("action file missing degree");
    return PermutationAction(degree, std::move(gens));
}

Rat fixed_point_ratio(const PermutationAction& a, const Word& w) {
    if (w.letters.empty()) throw shape_error("fixed-point ratio needs a nonempty word");
    index_t fixed = 0;
    for (index_t i = 0; i < a.degree(); ++i)
        if (a.act(w, i) == i) ++fixed;
    return Rat(fixed) / Rat(a.degree());
}

bool in_neighborhood(const PermutationAction& a, const std::vector<Word>& s, const Rat& delta) {
    if (delta <= 0 || delta > 1) throw shape_error("neighborhood radius must lie in (0, 1]");
    for (const Word& w : s)
        if (!(fixed_point_ratio(a, w) < delta)) return false;
    return true;
}

Rat intersection_statistic(const PermutationAction& a, const std::vector<std::string>& sub_generators,
                           const std::vector<Word>& s, const Rat& delta) {
    std::vector<index_t> labels = a.orbit_labels(sub_generators);
    index_t orbit_count = 0;
    for (index_t l : labels) orbit_count = std::max(orbit_count, l + 1);
    std::vector<index_t> orbit_size(static_cast<std::size_t>(orbit_count), 0);
    for (index_t l : labels) ++orbit_size[static_cast<std::size_t>(l)];
    // per orbit, per word: count fixed points inside the orbit
    std::vector<bool> orbit_good(static_cast<std::size_t>(orbit_count), true);
    for (const Word& w : s) {
        std::vector<index_t> fixed(static_cast<std::size_t>(orbit_count), 0);
        for (index_t i = 0; i < a.degree(); ++i)
            if (a.act(w, i) == i) ++fixed[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        for (index_t o = 0; o < orbit_count; ++o) {
            Rat ratio = Rat(fixed[static_cast<std::size_t>(o)]) / Rat(orbit_size[static_cast<std::size_t>(o)]);
            if (!(ratio < delta)) orbit_good[static_cast<std::size_t>(o)] = false;
        }
    }
    index_t good_points = 0;
    for (index_t i = 0; i < a.degree(); ++i)
        if (orbit_good[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]) ++good_points;
    return Rat(good_points) / Rat(a.degree());
}

namespace {

index_t mod(index_t v, index_t n) {
    index_t m = v % n;
    return m < 0 ? m + n : m;
}

struct HeisElement {
    index_t a, b, c;
};

// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a b')
HeisElement heis_mul(const HeisElement& x, const HeisElement& y, index_t n) {
    return {mod(x.a + y.a, n), mod(x.b + y.b, n), mod(x.c + y.c + x.a * y.b, n)};
}

index_t heis_code(const HeisElement& e, index_t n) { return (e.a * n + e.b) * n + e.c; }

HeisElement heis_decode(index_t code, index_t n) {
    return {code / (n * n), (code / n) % n, code % n};
}

} // namespace

PermutationAction heisenberg_mod_regular(index_t n) {
    if (n < 2) throw shape_error("modulus must be at least 2");
    const index_t size = n * n * n;
    const HeisElement gens[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const char* names[3] = {"x", "y", "z"};
    std::vector<std::pair<std::string, std::vector<index_t>>> tables;
    for (int g = 0; g < 3; ++g) {
        std::vector<index_t> image(static_cast<std::size_t>(size));
        for (index_t i = 0; i < size; ++i)
            image[static_cast<std::size_t>(i)] = heis_code(heis_mul(gens[g], heis_decode(i, n), n), n);
        tables.emplace_back(names[g], std::move(image));
    }
    return PermutationAction(size, std::move(tables));
}

PermutationAction heisenberg_mod_cosets(index_t n) {
    if (n < 2) throw shape_error("modulus must be at least 2");
    // cosets g<x>: a point is the pair (b, c) of the representative with a = 0
    // after right-dividing by x^a ... enumerate cosets by orbit of right
    // multiplication instead: g ~ g x^t
    const index_t size = n * n * n;
    std::vector<index_t> coset_of(static_cast<std::size_t>(size), -1);
    std::vector<index_t> reps;
    for (index_t i = 0; i < size; ++i) {
        if (coset_of[static_cast<std::size_t>(i)] != -1) continue;
        index_t label = static_cast<index_t>(reps.size());
        reps.push_back(i);
        HeisElement g = heis_decode(i, n);
        HeisElement x{1, 0, 0};
        HeisElement at = g;
        for (index_t t = 0; t < n; ++t) {
            coset_of[static_cast<std::size_t>(heis_code(at, n))] = label;
            at = heis_mul(at, x, n);
        }
    }
    const index_t deg = static_cast<index_t>(reps.size());
    const HeisElement gens[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const char* names[3] = {"x", "y", "z"};
    std::vector<std::pair<std::string, std::vector<index_t>>> tables;
    for (int g = 0; g < 3; ++g) {
        std::vector<index_t> image(static_cast<std::size_t>(deg));
        for (index_t i = 0; i < deg; ++i) {
            HeisElement moved = heis_mul(gens[g], heis_decode(reps[static_cast<std::size_t>(i)], n), n);
            image[static_cast<std::size_t>(i)] = coset_of[static_cast<std::size_t>(heis_code(moved, n))];
        }
        tables.emplace_back(names[g], std::move(image));
    }
    return PermutationAction(deg, std::move(tables));
}

PermutationAction z2_mod_action(index_t n) {
    if (n < 1) throw shape_error("modulus must be positive");
    const index_t size = n * n;
    std::vector<std::pair<std::string, std::vector<index_t>>> tables;
    for (int g = 0; g < 2; ++g) {
        std::vector<index_t> image(static_cast<std::size_t>(size));
        for (index_t i = 0; i < size; ++i) {
            index_t a = i / n, b = i % n;
            if (g == 0)
                a = mod(a + 1, n);
            else
                b = mod(b + 1, n);
            image[static_cast<std::size_t>(i)] = a * n + b;
        }
        tables.emplace_back(g == 0 ? "x" : "y", std::move(image));
    }
    return PermutationAction(size, std::move(tables));
}

} // namespace chainreb
