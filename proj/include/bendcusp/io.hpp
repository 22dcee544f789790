#pragma once

/// Deterministic file output (CSV, SVG, JSON reports) and the library-level
/// entry points behind the command-line tool.  All numeric output is
/// formatted with "%.17g" so repeated runs with the same inputs produce
/// byte-identical files.

#include "numeric.hpp"
#include "domain.hpp"
#include "hilbert.hpp"
#include "cusp.hpp"
#include "bending.hpp"
#include "classify.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace bendcusp {
namespace io {

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Write a file atomically: stage next to the target, then rename.
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw GeometryError("cannot open " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) {
        append_row(header);
    }
    void append_row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ << ',';
            body_ << cells[i];
        }
        body_ << '\n';
    }
    std::string str() const { return body_.str(); }

  private:
    std::ostringstream body_;
};

inline nlohmann::json matrix_to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

inline Mat matrix_from_json(const nlohmann::json& rows) {
    int n = static_cast<int>(rows.size());
    Mat m(n, static_cast<int>(rows.at(0).size()));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c].get<double>();
    return m;
}

inline nlohmann::json cusp_report_to_json(const CuspReport& r) {
    nlohmann::json j;
    j["kind"] = cusp_class_name(r.kind);
    j["beta"] = r.beta;
    j["b"] = r.b;
    j["delta"] = r.delta;
    j["pencil"] = matrix_to_json(r.pencil);
    j["conjugator"] = matrix_to_json(r.conjugator);
    j["normal_form"] = matrix_to_json(r.normal_form);
    j["normal_residual"] = r.normal_residual;
    j["tolerance"] = r.tolerance;
    j["inverted"] = r.inverted;
    j["witness_certified"] = r.witness_certified;
    return j;
}

/// Simple SVG document of polylines in a fixed viewport.
class SvgPlot {
  public:
    SvgPlot(double xmin, double xmax, double ymin, double ymax,
            int width = 640, int height = 640)
        : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax),
          width_(width), height_(height) {}

    void add_polyline(const std::vector<std::pair<double, double>>& pts,
                      const std::string& color = "black") {
        std::ostringstream s;
        s << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1\" points=\"";
        for (size_t i = 0; i < pts.size(); ++i) {
            if (i) s << ' ';
            s << format_double(mapx(pts[i].first)) << ','
              << format_double(mapy(pts[i].second));
        }
        s << "\"/>\n";
        shapes_ += s.str();
    }

    std::string str() const {
        std::ostringstream s;
        s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
          << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' '
          << height_ << "\">\n"
          << shapes_ << "</svg>\n";
        return s.str();
    }

  private:
    double mapx(double x) const {
        return (x - xmin_) / (xmax_ - xmin_) * width_;
    }
    double mapy(double y) const {
        return (ymax_ - y) / (ymax_ - ymin_) * height_;
    }
    double xmin_, xmax_, ymin_, ymax_;
    int width_, height_;
    std::string shapes_;
};

struct NamedCusp {
    std::string name;
    PeripheralData data;
};

inline std::vector<NamedCusp> load_peripheral_file(const nlohmann::json& j) {
    std::vector<NamedCusp> out;
    try {
        int d = j.at("dimension").get<int>();
        for (const auto& cusp : j.at("cusps")) {
            NamedCusp nc;
            nc.name = cusp.at("name").get<std::string>();
            nc.data.dimension = d;
            for (const auto& m : cusp.at("delta"))
                nc.data.delta.push_back(matrix_from_json(m));
            nc.data.gamma0 = matrix_from_json(cusp.at("gamma"));
            for (const auto& pt : cusp.at("points"))
                nc.data.points.push_back(
                    {pt.at(0).get<double>(), pt.at(1).get<int>()});
            out.push_back(std::move(nc));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("peripheral data: ") + e.what());
    }
    if (out.empty()) throw ConfigError("peripheral data: no cusps");
    return out;
}

struct RunOptions {
    std::string input;
    std::vector<double> ts = {0.0};
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    double tol = 1e-7;
};

enum ExitCode {
    kOk = 0,
    kInputError = 1,
    kDegeneracy = 2,
    kNumericalFailure = 3,
};

namespace detail {

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read input file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad json: ") + e.what());
    }
    return j;
}

inline std::filesystem::path prepare_out_dir(const RunOptions& opt) {
    std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline nlohmann::json witness_to_json(const DegenerateWitness& w) {
    nlohmann::json j;
    auto seq = [](const std::vector<Vec>& pts) {
        nlohmann::json a = nlohmann::json::array();
        for (const Vec& p : pts) {
            nlohmann::json row = nlohmann::json::array();
            for (int i = 0; i < p.size(); ++i) row.push_back(p[i]);
            a.push_back(row);
        }
        return a;
    };
    j["seq_plus"] = seq(w.seq_plus);
    j["seq_minus"] = seq(w.seq_minus);
    j["residual_plus"] = w.residual_plus;
    j["residual_minus"] = w.residual_minus;
    return j;
}

}  // namespace detail

/// classify: one report per cusp per parameter; exit 2 when any cusp is
/// degenerate (its witness is written alongside the reports).
inline int run_classify(const RunOptions& opt) {
    nlohmann::json j = detail::read_json_file(opt.input);
    std::vector<NamedCusp> cusps = load_peripheral_file(j);
    std::filesystem::path dir = detail::prepare_out_dir(opt);

    bool degenerate = false;
    nlohmann::json reports = nlohmann::json::array();
    for (const NamedCusp& nc : cusps) {
        for (double t : opt.ts) {
            CuspReport r = classify(nc.data, t, opt.tol);
            nlohmann::json entry = cusp_report_to_json(r);
            entry["cusp"] = nc.name;
            entry["t"] = t;
            reports.push_back(entry);
            if (r.kind == CuspClass::DegenerateP ||
                r.kind == CuspClass::DegenerateB) {
                degenerate = true;
                int d = nc.data.dimension;
                std::vector<Vec> basis;
                for (int i = 0; i < d - 1; ++i)
                    basis.push_back(Vec::Unit(d - 1, i));
                DegenerateWitness w = degenerate_affine_line_witness(
                    r.kind == CuspClass::DegenerateP
                        ? DegenerateVariant::PPrime
                        : DegenerateVariant::BPrime,
                    basis);
                atomic_write(dir / ("witness_" + nc.name + ".json"),
                             detail::witness_to_json(w).dump(1) + "\n");
            }
        }
    }
    atomic_write(dir / "classify.json", reports.dump(1) + "\n");
    return degenerate ? kDegeneracy : kOk;
}

/// volume: shell-by-shell Busemann volume estimates as CSV.
inline int run_volume(const RunOptions& opt) {
    nlohmann::json j = detail::read_json_file(opt.input);
    CuspKind kind;
    int d;
    CuspLatticeCell cell;
    ShellSchedule schedule;
    long long samples;
    try {
        std::string k = j.at("kind").get<std::string>();
        if (k == "standard") kind = CuspKind::Standard;
        else if (k == "bent") kind = CuspKind::Bent;
        else throw ConfigError("kind must be \"standard\" or \"bent\"");
        d = j.at("dimension").get<int>();
        auto lo = j.at("cell_lo").get<std::vector<double>>();
        auto hi = j.at("cell_hi").get<std::vector<double>>();
        cell.lo = Eigen::Map<const Vec>(lo.data(), lo.size());
        cell.hi = Eigen::Map<const Vec>(hi.data(), hi.size());
        schedule.x0 = j.value("x0", 16.0);
        schedule.count = j.value("shells", 9);
        samples = j.value("samples", 100000LL);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("volume config: ") + e.what());
    }

    std::vector<VolumeEstimate> shells =
        cusp_volume_estimate(kind, d, cell, schedule, samples, opt.seed);

    CsvWriter csv({"shell", "x_lo", "x_hi", "value", "stderr", "samples",
                   "seed"});
    for (size_t k = 0; k < shells.size(); ++k) {
        double X = schedule.x0 * std::pow(2.0, static_cast<double>(k));
        csv.append_row({std::to_string(k), format_double(X),
                        format_double(2 * X), format_double(shells[k].value),
                        format_double(shells[k].standard_error),
                        std::to_string(shells[k].sample_count),
                        std::to_string(shells[k].rng_seed)});
        if (!std::isfinite(shells[k].value))
            throw GeometryError("volume estimate is not finite");
    }
    std::filesystem::path dir = detail::prepare_out_dir(opt);
    atomic_write(dir / "volume.csv", csv.str());
    return kOk;
}

namespace detail {

/// Polyline along the boundary of a 2-dimensional domain slice, traced by
/// shooting rays from an interior point.
inline std::vector<std::pair<double, double>>
boundary_polyline(const ConvexDomain& omega, int rays = 256) {
    if (omega.dim() != 2)
        throw GeometryError("boundary_polyline needs a 2-dimensional slice");
    Vec center = omega.interior_point();
    ProjectivePoint base = omega.unchart(center);
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k <= rays; ++k) {
        double angle = 2.0 * M_PI * k / rays;
        Vec dir(2);
        dir << std::cos(angle), std::sin(angle);
        auto [minus, plus] = omega.boundary_hit(base, dir);
        (void)minus;
        if (!plus.finite) {
            // Clip unbounded directions at a fixed chart radius.
            pts.push_back({center[0] + 40 * dir[0], center[1] + 40 * dir[1]});
            continue;
        }
        Vec hit = omega.chart(plus.point);
        pts.push_back({hit[0], hit[1]});
    }
    return pts;
}

}  // namespace detail

/// plot: SVG polylines of domain slices, omega_x sections, or the
/// developing map of the circle.
inline int run_plot(const RunOptions& opt) {
    nlohmann::json j = detail::read_json_file(opt.input);
    std::filesystem::path dir = detail::prepare_out_dir(opt);
    std::string kind;
    try {
        kind = j.at("kind").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("plot config: ") + e.what());
    }

    if (kind == "slice") {
        // {x = const} slices of the bent domain in (y, v_1).
        SvgPlot svg(-6, 6, -1, 8);
        for (double x : {0.5, 1.0, 2.0, 4.0}) {
            BentDomain omega(3);
            // Boundary graph x + log y - v^2/2 = 0 traced over v.
            std::vector<std::pair<double, double>> pts;
            for (int k = 0; k <= 512; ++k) {
                double v = -6.0 + 12.0 * k / 512;
                pts.push_back({v, std::exp(0.5 * v * v - x)});
            }
            (void)omega;
            svg.add_polyline(pts);
        }
        atomic_write(dir / "slice.svg", svg.str());
    } else if (kind == "omega_x") {
        int d = j.value("dimension", 3);
        auto xs = j.at("x").get<std::vector<double>>();
        if (static_cast<int>(xs.size()) != d)
            throw ConfigError("omega_x plot: x must have d entries");
        Vec x = Eigen::Map<const Vec>(xs.data(), xs.size());
        BentDomain omega(d);
        ProjectivePoint p = omega.unchart(x);
        if (omega.defining(x) > 0)
            throw ConfigError("omega_x plot: x must lie on the boundary");
        PlaneSliceDomain section = omega_x_section(p, d);
        auto pts = detail::boundary_polyline(section);
        SvgPlot svg(-8, 8, -8, 8);
        svg.add_polyline(pts);
        atomic_write(dir / "omega_x.svg", svg.str());
    } else if (kind == "developing") {
        std::vector<SignedPoint> points;
        for (const auto& pt : j.at("points"))
            points.push_back({pt.at(0).get<double>(), pt.at(1).get<int>()});
        SvgPlot svg(0, 1, 0, 3);
        for (double t : opt.ts) {
            AffineCircleMap m = affine_circle_developing(points, t);
            std::vector<std::pair<double, double>> pts;
            for (int k = 0; k <= 512; ++k) {
                double x = static_cast<double>(k) / 512;
                pts.push_back({x, m(x)});
            }
            svg.add_polyline(pts);
        }
        atomic_write(dir / "developing.svg", svg.str());
    } else {
        throw ConfigError("unknown plot kind: " + kind);
    }
    return kOk;
}

namespace detail {

/// Standard-model domain with a sinusoidal boundary ripple, for exercising
/// the sandwich bounds on non-model input.
class RippleDomain : public ConvexDomain {
  public:
    RippleDomain(int d, double amp, double freq)
        : d_(d), amp_(amp), freq_(freq) {}
    int dim() const override { return d_; }
    double defining(const Vec& u) const override {
        return u[0] - 0.5 * u.tail(d_ - 1).squaredNorm() -
               amp_ * std::sin(freq_ * u[1]);
    }
    Vec interior_point() const override {
        Vec u = Vec::Zero(d_);
        u[0] = 10.0 + std::abs(amp_);
        return u;
    }

  private:
    int d_;
    double amp_, freq_;
};

}  // namespace detail

/// sandwich: grid-certified horoball sandwich constants as CSV.
inline int run_sandwich(const RunOptions& opt) {
    nlohmann::json j = detail::read_json_file(opt.input);
    std::string model;
    int d, grid;
    BoxRegion cell;
    double amp, freq;
    try {
        model = j.at("model").get<std::string>();
        d = j.at("dimension").get<int>();
        auto lo = j.at("cell_lo").get<std::vector<double>>();
        auto hi = j.at("cell_hi").get<std::vector<double>>();
        cell.lo = Eigen::Map<const Vec>(lo.data(), lo.size());
        cell.hi = Eigen::Map<const Vec>(hi.data(), hi.size());
        grid = j.value("grid", 33);
        amp = j.value("perturb_amplitude", 0.0);
        freq = j.value("perturb_frequency", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("sandwich config: ") + e.what());
    }

    CuspKind kind;
    DomainPtr omega;
    if (model == "standard") {
        kind = CuspKind::Standard;
        if (amp != 0.0)
            omega = std::make_shared<detail::RippleDomain>(d, amp, freq);
        else
            omega = std::make_shared<ParaboloidDomain>(d);
    } else if (model == "bent") {
        kind = CuspKind::Bent;
        omega = std::make_shared<BentDomain>(d);
    } else {
        throw ConfigError("sandwich model must be \"standard\" or \"bent\"");
    }

    SandwichBounds b = horoball_sandwich(*omega, kind, cell, grid);
    CsvWriter csv({"d_upper", "e_lower", "grid_margin"});
    csv.append_row({format_double(b.d_upper), format_double(b.e_lower),
                    format_double(b.grid_margin)});
    std::filesystem::path dir = detail::prepare_out_dir(opt);
    atomic_write(dir / "sandwich.csv", csv.str());
    return kOk;
}

/// bendcheck: relator residuals of the bent representation at each t, plus
/// an irreducibility summary.
inline int run_bendcheck(const RunOptions& opt) {
    nlohmann::json j = detail::read_json_file(opt.input);
    BendingData data = load_bending_data(j);

    CsvWriter csv({"t", "relator", "residual"});
    nlohmann::json summary = nlohmann::json::array();
    for (double t : opt.ts) {
        BentRepresentation rep = bend(data, t, std::max(opt.tol, 1e-8));
        for (size_t r = 0; r < data.relators.size(); ++r) {
            double res =
                rep.evaluate_word(data.relators[r]).identity_residual();
            csv.append_row({format_double(t), std::to_string(r),
                            format_double(res)});
        }
        IrreducibilityReport rpt =
            irreducibility_heuristic(rep, 6, 20, opt.seed);
        nlohmann::json entry;
        entry["t"] = t;
        entry["invariant_subspace_found"] = rpt.found;
        entry["degenerate"] = rpt.degenerate;
        entry["subspace_dimension"] = rpt.dimension;
        entry["residual"] = rpt.residual;
        summary.push_back(entry);
    }
    std::filesystem::path dir = detail::prepare_out_dir(opt);
    atomic_write(dir / "bendcheck.csv", csv.str());
    atomic_write(dir / "bendcheck.json", summary.dump(1) + "\n");
    return kOk;
}

/// Top-level dispatcher with the documented exit-code contract.
inline int run_command(const std::string& command, const RunOptions& opt,
                       std::string* error_out = nullptr) {
    try {
        if (command == "classify") return run_classify(opt);
        if (command == "volume") return run_volume(opt);
        if (command == "plot") return run_plot(opt);
        if (command == "sandwich") return run_sandwich(opt);
        if (command == "bendcheck") return run_bendcheck(opt);
        if (error_out) *error_out = "unknown command: " + command;
        return kInputError;
    } catch (const ConfigError& e) {
        if (error_out) *error_out = e.what();
        return kInputError;
    } catch (const std::exception& e) {
        if (error_out) *error_out = e.what();
        return kNumericalFailure;
    }
}

}  // namespace io
}  // namespace bendcusp
