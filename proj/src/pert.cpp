#include "mlab/pert.hpp"

#include "mlab/errors.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace mlab {

namespace {

using nlohmann::json;

Rat coeff_from_json(const json& v) {
    if (v.is_string()) return rat_from_string(v.get<std::string>());
    if (v.is_number_integer()) return Rat(v.get<long long>());
    fail(ErrorCode::BadInput,
         "coefficients must be strings (\"3/4\", \"0.25\") or integers; "
         "noninteger JSON numbers are not exact");
}

Poly2 poly_from_json(const json& arr, int n) {
    if (!arr.is_array()) fail(ErrorCode::BadInput, "polynomial must be an array of [i,j,c] triples");
    Poly2 p;
    for (const auto& t : arr) {
        if (!t.is_array() || t.size() != 3)
            fail(ErrorCode::BadInput, "each monomial must be an [i,j,c] triple");
        int i = t[0].get<int>(), j = t[1].get<int>();
        if (i < 0 || j < 0)
            fail(ErrorCode::UnsupportedIndex, "negative monomial exponent");
        if (i + j > kMaxMonomialDegree)
            fail(ErrorCode::UnsupportedIndex, "monomial degree beyond supported maximum");
        if (i + j > n)
            fail(ErrorCode::BadInput, "monomial degree exceeds declared n");
        Rat c = coeff_from_json(t[2]);
        if (c != 0) p[{i, j}] += c;
    }
    // drop exact cancellations
    for (auto it = p.begin(); it != p.end();)
        it = (it->second == 0) ? p.erase(it) : std::next(it);
    return p;
}

json poly_to_json(const Poly2& p) {
    json arr = json::array();
    for (const auto& [ij, c] : p)
        arr.push_back({ij.first, ij.second, rat_to_string(c)});
    return arr;
}

} // namespace

PerturbationSpec perturbation_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorCode::BadInput, std::string("JSON parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("n"))
        fail(ErrorCode::BadInput, "perturbation needs a field n (plus/minus optional)");
    PerturbationSpec ps;
    ps.n = doc["n"].get<int>();
    if (ps.n < 0 || ps.n > kMaxMonomialDegree)
        fail(ErrorCode::UnsupportedIndex, "n outside supported range");
    auto side = [&](const char* key, Poly2& p, Poly2& q) {
        if (!doc.contains(key)) return; // absent half-plane: zero perturbation there
        const json& s = doc[key];
        if (!s.is_object()) fail(ErrorCode::BadInput, "plus/minus must be objects with p, q");
        p = s.contains("p") ? poly_from_json(s["p"], ps.n) : Poly2{};
        q = s.contains("q") ? poly_from_json(s["q"], ps.n) : Poly2{};
    };
    side("plus", ps.p_plus, ps.q_plus);
    side("minus", ps.p_minus, ps.q_minus);
    return ps;
}

std::string perturbation_to_json(const PerturbationSpec& ps) {
    json doc;
    doc["n"] = ps.n;
    doc["plus"] = {{"p", poly_to_json(ps.p_plus)}, {"q", poly_to_json(ps.q_plus)}};
    doc["minus"] = {{"p", poly_to_json(ps.p_minus)}, {"q", poly_to_json(ps.q_minus)}};
    return doc.dump();
}

PerturbationSpec random_perturbation(std::mt19937_64& rng, int n) {
    if (n < 0 || n > kMaxMonomialDegree)
        fail(ErrorCode::UnsupportedIndex, "n outside supported range");
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
    auto fill = [&](Poly2& p) {
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) {
                Rat c(num(rng), den(rng));
                if (c != 0) p[{i, j}] = c;
            }
    };
    PerturbationSpec ps;
    ps.n = n;
    fill(ps.p_plus);
    fill(ps.q_plus);
    fill(ps.p_minus);
    fill(ps.q_minus);
    return ps;
}

PerturbationSpec scale_perturbation(const PerturbationSpec& ps, const Rat& c) {
    PerturbationSpec out;
    out.n = ps.n;
    auto sc = [&](const Poly2& p) {
        Poly2 r;
        if (c == 0) return r;
        for (const auto& [ij, v] : p) r[ij] = v * c;
        return r;
    };
    out.p_plus = sc(ps.p_plus);
    out.q_plus = sc(ps.q_plus);
    out.p_minus = sc(ps.p_minus);
    out.q_minus = sc(ps.q_minus);
    return out;
}

Poly2 rho_assembly(const PerturbationSpec& ps) {
    Poly2 rho;
    auto add = [&](int i, int j, const Rat& v) {
        if (v == 0) return;
        rho[{i, j}] += v;
    };
    for (const auto& [ij, v] : ps.q_plus) add(ij.first, ij.second, v);
    for (const auto& [ij, v] : ps.q_minus)
        add(ij.first, ij.second, (ij.second % 2 == 0) ? -v : v); // (-1)^(j+1)
    for (const auto& [ij, v] : ps.p_plus) {
        auto [i, j] = ij;
        if (i >= 1) add(i - 1, j + 1, v * Rat(i, j + 1));
    }
    for (const auto& [ij, v] : ps.p_minus) {
        auto [i, j] = ij;
        if (i >= 1) add(i - 1, j + 1, ((j % 2 == 0) ? v : -v) * Rat(i, j + 1)); // (-1)^j
    }
    for (auto it = rho.begin(); it != rho.end();)
        it = (it->second == 0) ? rho.erase(it) : std::next(it);
    return rho;
}

} // namespace mlab
