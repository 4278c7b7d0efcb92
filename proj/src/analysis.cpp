#include <agmarl/analysis.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace agmarl {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) {
        throw std::invalid_argument("pearson: columns must be non-empty and equally sized");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        return kNan;  // undefined, never coerced to 0
    }
    return sxy / std::sqrt(sxx * syy);
}

double util_stddev_in_window(const MetricsFrame& frame, double start_s, double end_s) {
    std::map<int, std::pair<double, int>> acc;  // node -> (util sum, count)
    for (const ClusterSample& cs : frame.samples) {
        if (cs.time_s < start_s || cs.time_s >= end_s) continue;
        for (const NodeSample& ns : cs.nodes) {
            const double util = 0.5 * (static_cast<double>(ns.cpu_req_mcpu) / ns.cpu_cap_mcpu +
                                       static_cast<double>(ns.mem_req_mib) / ns.mem_cap_mib);
            acc[ns.node_id].first += util;
            acc[ns.node_id].second += 1;
        }
    }
    if (acc.empty()) return 0.0;
    std::vector<double> means;
    means.reserve(acc.size());
    for (const auto& [id, su] : acc) {
        means.push_back(su.first / su.second);
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= static_cast<double>(means.size());
    return std::sqrt(var);
}

namespace {

std::vector<std::string> node_labels(const std::vector<int>& ids) {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back("node" + std::to_string(id));
    return out;
}

LabeledMatrix app_by_node(const std::vector<std::string>& apps, const std::vector<int>& nodes,
                          const std::map<std::string, std::map<int, long>>& counts) {
    LabeledMatrix m;
    m.rows = apps;
    m.cols = node_labels(nodes);
    m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(apps.size()),
                                     static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t a = 0; a < apps.size(); ++a) {
        auto ait = counts.find(apps[a]);
        if (ait == counts.end()) continue;
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            auto nit = ait->second.find(nodes[n]);
            if (nit != ait->second.end()) {
                m.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(n)) =
                    static_cast<double>(nit->second);
            }
        }
    }
    return m;
}

// node x app requested-CPU matrix from the last sample at or before `at_s`
LabeledMatrix cpu_by_app_at(const MetricsFrame& frame, double at_s) {
    const ClusterSample* pick = nullptr;
    for (const ClusterSample& cs : frame.samples) {
        if (cs.time_s <= at_s) pick = &cs;
    }
    LabeledMatrix m;
    m.rows = node_labels(frame.node_ids);
    m.cols = frame.apps;
    m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(frame.node_ids.size()),
                                     static_cast<Eigen::Index>(frame.apps.size()));
    if (pick == nullptr) return m;
    for (const NodeSample& ns : pick->nodes) {
        const auto nit = std::find(frame.node_ids.begin(), frame.node_ids.end(), ns.node_id);
        if (nit == frame.node_ids.end()) continue;
        const Eigen::Index r = nit - frame.node_ids.begin();
        for (std::size_t a = 0; a < frame.apps.size(); ++a) {
            auto cit = ns.cpu_by_app_mcpu.find(frame.apps[a]);
            if (cit != ns.cpu_by_app_mcpu.end()) {
                m.values(r, static_cast<Eigen::Index>(a)) = cit->second;
            }
        }
    }
    return m;
}

}  // namespace

AnalysisBundle analyze(const MetricsFrame& frame) {
    if (frame.samples.empty()) {
        throw std::invalid_argument("analyze: frame has no samples");
    }
    AnalysisBundle b;

    std::map<std::string, std::map<int, long>> final_counts;
    for (const auto& [app, per_node] : frame.final_pods_by_app_node) {
        for (const auto& [node, count] : per_node) {
            final_counts[app][node] = count;
        }
    }
    b.distribution = app_by_node(frame.apps, frame.node_ids, final_counts);
    b.cpu_by_app = cpu_by_app_at(frame, frame.duration_s);
    for (const ScenarioPhase& p : frame.phases) {
        b.phase_util.emplace_back(p.name, cpu_by_app_at(frame, p.end_min * 60.0 - 1e-9));
    }
    b.restarts_heatmap = app_by_node(frame.apps, frame.node_ids, frame.restarts_by_app_node);

    // pairplot rows: one per (sample, node)
    std::size_t rows = 0;
    for (const ClusterSample& cs : frame.samples) rows += cs.nodes.size();
    b.pair_data.resize(static_cast<Eigen::Index>(rows), 5);
    Eigen::Index r = 0;
    for (const ClusterSample& cs : frame.samples) {
        for (const NodeSample& ns : cs.nodes) {
            b.pair_data(r, 0) = ns.cpu_req_mcpu / 1000.0;
            b.pair_data(r, 1) = ns.mem_req_mib / 1024.0;
            b.pair_data(r, 2) = static_cast<double>(ns.failures_cum);
            b.pair_data(r, 3) = static_cast<double>(ns.restarts_cum);
            b.pair_data(r, 4) = ns.cost_accrued;
            ++r;
        }
    }

    const std::vector<std::string>& cols = pair_columns();
    b.correlation.rows = cols;
    b.correlation.cols = cols;
    b.correlation.values.resize(5, 5);
    for (int i = 0; i < 5; ++i) {
        std::vector<double> xi(b.pair_data.rows());
        for (Eigen::Index k = 0; k < b.pair_data.rows(); ++k) xi[static_cast<std::size_t>(k)] = b.pair_data(k, i);
        for (int j = 0; j < 5; ++j) {
            std::vector<double> xj(b.pair_data.rows());
            for (Eigen::Index k = 0; k < b.pair_data.rows(); ++k) xj[static_cast<std::size_t>(k)] = b.pair_data(k, j);
            b.correlation.values(i, j) = pearson(xi, xj);
        }
    }

    AnalysisScalars& s = b.scalars;
    for (const ScenarioPhase& p : frame.phases) {
        s.util_stddev_by_phase[p.name] = util_stddev_in_window(frame, p.start_min * 60.0, p.end_min * 60.0);
    }
    s.util_stddev_overall = util_stddev_in_window(frame, 0.0, frame.duration_s + 1.0);

    for (const auto& [app, per_node] : frame.restarts_by_app_node) {
        long worst = 0;
        for (const auto& [node, count] : per_node) worst = std::max(worst, count);
        s.max_restarts_by_app[app] = worst;
        for (const auto& [node, count] : per_node) {
            s.total_restarts += count;
        }
    }
    for (const auto& [app, per_node] : frame.failures_by_app_node) {
        for (const auto& [node, count] : per_node) s.total_failures += count;
    }

    double clearance = 0.0;
    for (const PodOutcome& o : frame.outcomes) {
        if (o.priority != PriorityClass::Burst) continue;
        const double wait = o.bound_s >= 0.0 ? o.bound_s - o.arrival_s : frame.duration_s - o.arrival_s;
        clearance = std::max(clearance, wait);
    }
    s.burst_clearance_s = clearance;
    s.total_cost = frame.total_cost;
    s.deferred_admissions = frame.deferred_admissions;
    return b;
}

nlohmann::json scalars_to_json(const AnalysisScalars& s) {
    nlohmann::json j;
    j["util_stddev_by_phase"] = s.util_stddev_by_phase;
    j["util_stddev_overall"] = s.util_stddev_overall;
    j["max_restarts_by_app"] = s.max_restarts_by_app;
    j["burst_clearance_s"] = s.burst_clearance_s;
    j["total_cost"] = s.total_cost;
    j["total_restarts"] = s.total_restarts;
    j["total_failures"] = s.total_failures;
    j["deferred_admissions"] = s.deferred_admissions;
    return j;
}

void write_frame_csv(const std::string& path, const MetricsFrame& frame) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << "time_s,node_id,cpu_req_mcpu,mem_req_mib,cpu_cap_mcpu,mem_cap_mib,memory_pressure,"
          "restarts_cum,failures_cum,node_cost,stress,running,pending,deferred,cost_accrued";
    for (const std::string& app : frame.apps) os << ",pods_" << app;
    os << "\n";
    for (const ClusterSample& cs : frame.samples) {
        for (const NodeSample& ns : cs.nodes) {
            os << fmt(cs.time_s) << ',' << ns.node_id << ',' << ns.cpu_req_mcpu << ',' << ns.mem_req_mib
               << ',' << ns.cpu_cap_mcpu << ',' << ns.mem_cap_mib << ',' << (ns.memory_pressure ? 1 : 0)
               << ',' << ns.restarts_cum << ',' << ns.failures_cum << ',' << fmt(ns.cost_accrued) << ','
               << fmt(cs.stress) << ',' << cs.running << ',' << cs.pending << ',' << cs.deferred_admissions
               << ',' << fmt(cs.cost_accrued);
            for (const std::string& app : frame.apps) {
                auto it = ns.pods_by_app.find(app);
                os << ',' << (it == ns.pods_by_app.end() ? 0 : it->second);
            }
            os << "\n";
        }
    }
}

void write_outcomes_csv(const std::string& path, const MetricsFrame& frame) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << "pod_id,app,priority,arrival_s,bound_s,node_id\n";
    for (const PodOutcome& o : frame.outcomes) {
        os << o.pod_id << ',' << o.app << ',' << to_string(o.priority) << ',' << fmt(o.arrival_s) << ','
           << (o.bound_s >= 0.0 ? fmt(o.bound_s) : "never") << ',' << o.node_id << "\n";
    }
}

void write_matrix_csv(const std::string& path, const LabeledMatrix& m) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << "";
    for (const std::string& c : m.cols) os << ',' << c;
    os << "\n";
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        os << m.rows[r];
        for (std::size_t c = 0; c < m.cols.size(); ++c) {
            os << ',' << fmt(m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        }
        os << "\n";
    }
}

void write_pairdata_csv(const std::string& path, const Eigen::MatrixXd& data) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    const std::vector<std::string>& cols = pair_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        os << (i ? "," : "") << cols[i];
    }
    os << "\n";
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        for (Eigen::Index c = 0; c < data.cols(); ++c) {
            os << (c ? "," : "") << fmt(data(r, c));
        }
        os << "\n";
    }
}

namespace {

// blue -> yellow ramp
std::string heat_color(double v) {
    v = std::clamp(v, 0.0, 1.0);
    const int red = static_cast<int>(30 + 225 * v);
    const int green = static_cast<int>(40 + 180 * v);
    const int blue = static_cast<int>(120 - 90 * v);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", red, green, blue);
    return buf;
}

std::string bar_color(std::size_t idx) {
    static const char* palette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52",
                                    "#8172b3", "#937860", "#da8bc3", "#8c8c8c"};
    return palette[idx % 8];
}

}  // namespace

std::string svg_heatmap(const LabeledMatrix& m, const std::string& title) {
    const int cell = 48, left = 130, top = 50;
    const int w = left + cell * static_cast<int>(m.cols.size()) + 20;
    const int h = top + cell * static_cast<int>(m.rows.size()) + 30;
    double vmax = 1e-12;
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
            if (std::isfinite(m.values(r, c))) vmax = std::max(vmax, std::abs(m.values(r, c)));
        }
    }
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    os << "<text x='10' y='20' font-size='14' font-family='sans-serif'>" << title << "</text>\n";
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        os << "<text x='5' y='" << top + cell * r + cell / 2 + 4
           << "' font-size='10' font-family='sans-serif'>" << m.rows[r] << "</text>\n";
        for (std::size_t c = 0; c < m.cols.size(); ++c) {
            const double v = m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            const std::string color = std::isnan(v) ? "#dddddd" : heat_color(std::abs(v) / vmax);
            os << "<rect x='" << left + cell * c << "' y='" << top + cell * r << "' width='" << cell - 2
               << "' height='" << cell - 2 << "' fill='" << color << "'/>\n";
            os << "<text x='" << left + cell * c + 4 << "' y='" << top + cell * r + cell / 2 + 4
               << "' font-size='10' font-family='sans-serif'>" << fmt(std::isnan(v) ? v : std::round(v * 100) / 100)
               << "</text>\n";
        }
    }
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
        os << "<text x='" << left + cell * c << "' y='" << top - 8
           << "' font-size='10' font-family='sans-serif'>" << m.cols[c] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_stacked_bars(const LabeledMatrix& m, const std::string& title) {
    const int bar_w = 60, gap = 24, left = 60, top = 50, plot_h = 300;
    const int w = left + static_cast<int>(m.rows.size()) * (bar_w + gap) + 200;
    const int h = top + plot_h + 60;
    double vmax = 1e-12;
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
        vmax = std::max(vmax, m.values.row(r).sum());
    }
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    os << "<text x='10' y='20' font-size='14' font-family='sans-serif'>" << title << "</text>\n";
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        double y = top + plot_h;
        for (std::size_t c = 0; c < m.cols.size(); ++c) {
            const double v = m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (v <= 0.0) continue;
            const double seg = v / vmax * plot_h;
            y -= seg;
            os << "<rect x='" << left + r * (bar_w + gap) << "' y='" << y << "' width='" << bar_w
               << "' height='" << seg << "' fill='" << bar_color(c) << "'/>\n";
        }
        os << "<text x='" << left + r * (bar_w + gap) << "' y='" << top + plot_h + 16
           << "' font-size='10' font-family='sans-serif'>" << m.rows[r] << "</text>\n";
    }
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
        const int lx = w - 190;
        const int ly = top + static_cast<int>(c) * 18;
        os << "<rect x='" << lx << "' y='" << ly << "' width='12' height='12' fill='" << bar_color(c)
           << "'/>\n";
        os << "<text x='" << lx + 18 << "' y='" << ly + 10 << "' font-size='10' font-family='sans-serif'>"
           << m.cols[c] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_pair_grid(const Eigen::MatrixXd& data, const std::vector<std::string>& cols,
                          const std::string& title) {
    const int cell = 140, pad = 14, top = 40;
    const int n = static_cast<int>(cols.size());
    const int w = n * (cell + pad) + pad + 40;
    const int h = top + n * (cell + pad) + pad;
    std::vector<double> lo(cols.size()), hi(cols.size());
    for (int c = 0; c < n; ++c) {
        lo[static_cast<std::size_t>(c)] = data.rows() > 0 ? data.col(c).minCoeff() : 0.0;
        hi[static_cast<std::size_t>(c)] = data.rows() > 0 ? data.col(c).maxCoeff() : 1.0;
        if (hi[static_cast<std::size_t>(c)] <= lo[static_cast<std::size_t>(c)]) {
            hi[static_cast<std::size_t>(c)] = lo[static_cast<std::size_t>(c)] + 1.0;
        }
    }
    auto sx = [&](int c, double v) {
        return pad + c * (cell + pad) + (v - lo[static_cast<std::size_t>(c)]) /
                                            (hi[static_cast<std::size_t>(c)] - lo[static_cast<std::size_t>(c)]) * cell;
    };
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    os << "<text x='10' y='20' font-size='14' font-family='sans-serif'>" << title << "</text>\n";
    // subsample large frames so files stay small
    const Eigen::Index step = std::max<Eigen::Index>(1, data.rows() / 800);
    for (int ri = 0; ri < n; ++ri) {
        for (int ci = 0; ci < n; ++ci) {
            const int ox = pad + ci * (cell + pad);
            const int oy = top + ri * (cell + pad);
            os << "<rect x='" << ox << "' y='" << oy << "' width='" << cell << "' height='" << cell
               << "' fill='none' stroke='#999'/>\n";
            if (ri == ci) {
                // histogram on the diagonal
                constexpr int kBins = 16;
                std::vector<int> bins(kBins, 0);
                for (Eigen::Index k = 0; k < data.rows(); ++k) {
                    const double t = (data(k, ci) - lo[static_cast<std::size_t>(ci)]) /
                                     (hi[static_cast<std::size_t>(ci)] - lo[static_cast<std::size_t>(ci)]);
                    bins[std::min(kBins - 1, static_cast<int>(t * kBins))] += 1;
                }
                const int bmax = std::max(1, *std::max_element(bins.begin(), bins.end()));
                for (int bi = 0; bi < kBins; ++bi) {
                    const double bh = static_cast<double>(bins[static_cast<std::size_t>(bi)]) / bmax * (cell - 4);
                    os << "<rect x='" << ox + bi * cell / kBins << "' y='" << oy + cell - bh << "' width='"
                       << cell / kBins - 1 << "' height='" << bh << "' fill='#4c72b0'/>\n";
                }
                os << "<text x='" << ox + 4 << "' y='" << oy + 12
                   << "' font-size='9' font-family='sans-serif'>" << cols[static_cast<std::size_t>(ci)]
                   << "</text>\n";
            } else {
                for (Eigen::Index k = 0; k < data.rows(); k += step) {
                    os << "<circle cx='" << sx(ci, data(k, ci)) << "' cy='"
                       << oy + cell - (sx(ri, data(k, ri)) - (pad + ri * (cell + pad))) << "' r='1.2' fill='#dd8452' fill-opacity='0.5'/>\n";
                }
            }
        }
    }
    os << "</svg>\n";
    return os.str();
}

void write_bundle(const std::string& outdir, const MetricsFrame& frame, const AnalysisBundle& bundle) {
    const std::string prefix = outdir + "/" + frame.scenario + "_" + frame.policy + "_" +
                               std::to_string(frame.seed) + "_";
    write_frame_csv(prefix + "frames.csv", frame);
    write_outcomes_csv(prefix + "outcomes.csv", frame);
    write_matrix_csv(prefix + "distribution.csv", bundle.distribution);
    write_matrix_csv(prefix + "cpu_by_app.csv", bundle.cpu_by_app);
    for (const auto& [phase, matrix] : bundle.phase_util) {
        write_matrix_csv(prefix + "phase_util_" + phase + ".csv", matrix);
    }
    write_matrix_csv(prefix + "restarts.csv", bundle.restarts_heatmap);
    write_matrix_csv(prefix + "correlation.csv", bundle.correlation);
    write_pairdata_csv(prefix + "pairdata.csv", bundle.pair_data);

    auto put = [&](const std::string& name, const std::string& svg) {
        std::ofstream os(prefix + name, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for write: " + prefix + name);
        os << svg;
    };
    put("distribution_heatmap.svg", svg_heatmap(bundle.distribution, frame.scenario + " " + frame.policy + ": pods per app and node"));
    put("util_stacked.svg", svg_stacked_bars(bundle.cpu_by_app, frame.scenario + " " + frame.policy + ": requested mCPU per node"));
    put("restarts_heatmap.svg", svg_heatmap(bundle.restarts_heatmap, frame.scenario + " " + frame.policy + ": restarts per app and node"));
    put("pairplot.svg", svg_pair_grid(bundle.pair_data, pair_columns(), frame.scenario + " " + frame.policy + ": metric pairs"));
}

}  // namespace agmarl
