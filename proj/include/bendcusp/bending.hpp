#pragma once

/// Bending of holonomy representations along a totally geodesic wall:
/// amalgam and HNN data, the deformed representation rho_t, word evaluation,
/// the developing-map transformation rule, and a numeric irreducibility
/// heuristic.

#include "numeric.hpp"
#include "projective.hpp"
#include "hyperbolic.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace bendcusp {

struct IllFormedBending : GeometryError {
    using GeometryError::GeometryError;
};
struct WordError : GeometryError {
    using GeometryError::GeometryError;
};
struct ConfigError : GeometryError {
    using GeometryError::GeometryError;
};

struct BendingData {
    enum class Case { Amalgam, HNN };
    Case kind = Case::Amalgam;
    int dimension = 3;
    std::map<std::string, Mat> generators;            ///< rho_0 images
    std::vector<std::string> factor1;                 ///< Gamma_1 / Gamma_Sigma
    std::vector<std::string> factor2;                 ///< Gamma_2 (amalgam)
    std::vector<std::string> delta;                   ///< wall subgroup gens
    std::vector<std::vector<std::string>> relators;
    std::string stable_letter;                        ///< HNN only
};

namespace detail {

struct WordToken {
    std::string name;
    int exponent = 1;
};

inline WordToken parse_token(const std::string& tok) {
    WordToken t;
    auto caret = tok.find('^');
    if (caret == std::string::npos) {
        t.name = tok;
        return t;
    }
    t.name = tok.substr(0, caret);
    try {
        t.exponent = std::stoi(tok.substr(caret + 1));
    } catch (const std::exception&) {
        throw WordError("bad exponent in word token: " + tok);
    }
    return t;
}

}  // namespace detail

inline BendingData load_bending_data(const nlohmann::json& j) {
    BendingData data;
    try {
        std::string kind = j.at("case").get<std::string>();
        if (kind == "amalgam") data.kind = BendingData::Case::Amalgam;
        else if (kind == "hnn") data.kind = BendingData::Case::HNN;
        else throw ConfigError("case must be \"amalgam\" or \"hnn\"");
        data.dimension = j.at("dimension").get<int>();
        for (auto& [name, rows] : j.at("generators").items()) {
            int n = static_cast<int>(rows.size());
            Mat m(n, n);
            for (int r = 0; r < n; ++r) {
                if (static_cast<int>(rows[r].size()) != n)
                    throw ConfigError("generator " + name + " is not square");
                for (int c = 0; c < n; ++c)
                    m(r, c) = rows[r][c].get<double>();
            }
            if (n != data.dimension + 1)
                throw ConfigError("generator " + name +
                                  " has the wrong size for the dimension");
            data.generators[name] = m;
        }
        data.delta = j.at("delta").get<std::vector<std::string>>();
        for (auto& rel : j.at("relators"))
            data.relators.push_back(rel.get<std::vector<std::string>>());
        if (j.contains("factor1"))
            data.factor1 = j.at("factor1").get<std::vector<std::string>>();
        if (j.contains("factor2"))
            data.factor2 = j.at("factor2").get<std::vector<std::string>>();
        if (j.contains("stable_letter"))
            data.stable_letter = j.at("stable_letter").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bending data: ") + e.what());
    }
    if (data.kind == BendingData::Case::HNN && data.stable_letter.empty())
        throw ConfigError("hnn data needs a stable_letter");
    for (const std::string& name : data.delta)
        if (!data.generators.count(name))
            throw ConfigError("delta generator " + name + " is undeclared");
    return data;
}

/// The deformed representation: factor-1 generators keep their images,
/// factor-2 generators are conjugated by c_t (amalgam), the stable letter is
/// premultiplied by c_t (HNN).
class BentRepresentation {
  public:
    BentRepresentation(BendingData data, double t)
        : data_(std::move(data)), t_(t),
          ct_(bending_element(t, data_.dimension).matrix()) {}

    double t() const { return t_; }
    const BendingData& data() const { return data_; }

    Mat image(const std::string& name) const {
        auto it = data_.generators.find(name);
        if (it == data_.generators.end())
            throw WordError("unknown generator: " + name);
        const Mat& g = it->second;
        bool is_delta = contains(data_.delta, name);
        if (data_.kind == BendingData::Case::HNN) {
            if (name == data_.stable_letter) return ct_ * g;
            return g;
        }
        if (is_delta || contains(data_.factor1, name)) return g;
        if (contains(data_.factor2, name))
            return ct_ * g * ct_.inverse();
        return g;
    }

    Mat evaluate_word_matrix(const std::vector<std::string>& word) const {
        int n = data_.dimension + 1;
        Mat acc = Mat::Identity(n, n);
        for (const std::string& tok : word) {
            detail::WordToken t = detail::parse_token(tok);
            Mat g = image(t.name);
            Mat p = t.exponent >= 0 ? g : Mat(g.inverse());
            for (int k = 0; k < std::abs(t.exponent); ++k) acc = acc * p;
        }
        return acc;
    }

    ProjectiveMap evaluate_word(const std::vector<std::string>& word) const {
        return ProjectiveMap(evaluate_word_matrix(word));
    }

    const Mat& bending_matrix() const { return ct_; }

  private:
    static bool contains(const std::vector<std::string>& v,
                         const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    }

    BendingData data_;
    double t_;
    Mat ct_;
};

/// Build rho_t and verify well-definedness: c_t must centralize the wall
/// subgroup and every relator must map to +-identity.
inline BentRepresentation bend(const BendingData& data, double t,
                               double tol = 1e-8) {
    Mat ct = bending_element(t, data.dimension).matrix();
    for (const std::string& name : data.delta) {
        const Mat& g = data.generators.at(name);
        if ((ct * g - g * ct).norm() > tol)
            throw IllFormedBending("c_t does not centralize delta generator " +
                                   name);
    }
    BentRepresentation rep(data, t);
    for (const auto& rel : data.relators) {
        double res = rep.evaluate_word(rel).identity_residual();
        if (res > tol)
            throw IllFormedBending("relator residual " + std::to_string(res) +
                                   " exceeds tolerance");
    }
    return rep;
}

enum class TileSide { First, Second };

/// Developing-map rule for the bent structure: points carried by tiles on
/// the far side of the wall pick up an extra c_t.  On the wall itself the
/// two rules agree because c_t acts projectively trivially there.
inline ProjectivePoint developing_transform(const BentRepresentation& rep,
                                            const std::vector<std::string>& gamma,
                                            TileSide side,
                                            const ProjectivePoint& p) {
    Mat g = rep.evaluate_word_matrix(gamma);
    if (side == TileSide::Second) g = g * rep.bending_matrix();
    return ProjectivePoint(g * p.coords());
}

struct IrreducibilityReport {
    bool found = false;      ///< a common invariant subspace candidate exists
    bool degenerate = false; ///< the sampled group is (projectively) trivial
    int dimension = 0;       ///< dimension of the candidate subspace
    Mat basis;               ///< orthonormal basis of the candidate
    double residual = 0.0;   ///< invariance residual of the candidate
};

/// Numeric search for common invariant subspaces: candidates are the
/// eigenspace sums of random words; evidence only, not proof.
inline IrreducibilityReport
irreducibility_heuristic(const BentRepresentation& rep, int word_budget,
                         int trials, std::uint64_t seed = 7,
                         double tol = 1e-7) {
    std::vector<std::string> names;
    for (const auto& [name, g] : rep.data().generators) names.push_back(name);
    int n = rep.data().dimension + 1;

    std::vector<Mat> gens;
    for (const auto& name : names) gens.push_back(rep.image(name));

    IrreducibilityReport report;
    bool all_trivial = true;
    for (const Mat& g : gens)
        if (ProjectiveMap(g).identity_residual() > tol) all_trivial = false;
    if (all_trivial) {
        report.found = true;
        report.degenerate = true;
        report.dimension = 1;
        report.basis = Mat::Identity(n, 1);
        return report;
    }

    auto invariance_residual = [&](const Mat& basis) {
        // || (I - P) g P || over generators, P = orthogonal projector.
        Mat p = basis * basis.transpose();
        Mat q = Mat::Identity(n, n) - p;
        double worst = 0.0;
        for (const Mat& g : gens)
            worst = std::max(worst, (q * g * p).norm() / g.norm());
        return worst;
    };

    SplitMix64 rng(seed);
    double best = 1e300;
    for (int trial = 0; trial < trials; ++trial) {
        // Random word.
        std::vector<std::string> word;
        int len = 1 + static_cast<int>(rng.next() % std::max(1, word_budget));
        for (int k = 0; k < len; ++k) {
            std::string tok = names[rng.next() % names.size()];
            if (rng.next() % 2) tok += "^-1";
            word.push_back(tok);
        }
        Mat w = rep.evaluate_word_matrix(word);
        Eigen::EigenSolver<Mat> es(w);
        // Group eigenvalues into clusters; candidate subspaces are the real
        // spans of each cluster's eigenvectors.
        Eigen::VectorXcd vals = es.eigenvalues();
        Eigen::MatrixXcd vecs = es.eigenvectors();
        std::vector<bool> used(n, false);
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            Mat span(n, 0);
            auto add_column = [&](int j) {
                Mat wider(n, span.cols() + 2);
                wider.leftCols(span.cols()) = span;
                wider.col(span.cols()) = vecs.col(j).real();
                wider.col(span.cols() + 1) = vecs.col(j).imag();
                span = wider;
            };
            for (int j = i; j < n; ++j) {
                if (!used[j] && std::abs(vals[j] - vals[i]) <
                                    1e-6 * (1 + std::abs(vals[i]))) {
                    used[j] = true;
                    add_column(j);
                }
            }
            // Orthonormalize and drop numerically null directions.
            Eigen::ColPivHouseholderQR<Mat> qr(span);
            qr.setThreshold(1e-9);
            int rank = static_cast<int>(qr.rank());
            if (rank <= 0 || rank >= n) continue;
            Mat qfull = qr.householderQ() * Mat::Identity(n, rank);
            double res = invariance_residual(qfull);
            if (res < tol && res < best) {
                best = res;
                report.found = true;
                report.dimension = rank;
                report.basis = qfull;
                report.residual = res;
            }
        }
        if (report.found) break;
    }
    return report;
}

}  // namespace bendcusp
