#include "szsc/io.hpp"

#include <unistd.h>

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "szsc/errors.hpp"

namespace szsc {

namespace fs = std::filesystem;

namespace {

std::atomic<unsigned long> tmp_counter{0};

fs::path tmp_sibling(const fs::path& target) {
  const auto n = tmp_counter.fetch_add(1);
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(static_cast<long>(::getpid())) + "-" + std::to_string(n);
  return tmp;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string() + " for reading");
  return is;
}

double parse_double(const std::string& tok, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw InputError(context + ": '" + tok + "' is not a number");
  }
  if (used != tok.size()) throw InputError(context + ": '" + tok + "' is not a number");
  return v;
}

long parse_long(const std::string& tok, const std::string& context) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw InputError(context + ": '" + tok + "' is not an integer");
  }
  if (used != tok.size()) throw InputError(context + ": '" + tok + "' is not an integer");
  return v;
}

// Line-oriented "key value..." file; '#' starts a comment line.
std::vector<std::pair<std::string, std::vector<std::string>>> read_kv(const fs::path& path) {
  std::ifstream is = open_in(path);
  std::vector<std::pair<std::string, std::vector<std::string>>> entries;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    std::vector<std::string> values;
    std::string tok;
    while (ls >> tok) values.push_back(tok);
    entries.emplace_back(std::move(key), std::move(values));
  }
  return entries;
}

std::string single_value(const std::pair<std::string, std::vector<std::string>>& e,
                         const std::string& context) {
  if (e.second.size() != 1) {
    throw InputError(context + ": key '" + e.first + "' needs exactly one value");
  }
  return e.second.front();
}

}  // namespace

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = tmp_sibling(path);
  try {
    {
      std::ofstream os(tmp, std::ios::binary);
      if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
      body(os);
      os.flush();
      if (!os) throw IoError("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << fmt_double(m(r, c));
    }
    os << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& is, const std::string& context) {
  long rows = 0, cols = 0;
  if (!(is >> rows >> cols)) throw InputError(context + ": missing 'rows cols' header");
  if (rows < 1 || cols < 1) throw InputError(context + ": header declares an empty matrix");
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!(is >> v)) {
        throw InputError(context + ": body ends before entry (" + std::to_string(r) + "," +
                         std::to_string(c) + ")");
      }
      m(r, c) = v;
    }
  }
  std::string extra;
  if (is >> extra) throw InputError(context + ": trailing content after declared shape");
  return m;
}

void write_matrix_file(const fs::path& path, const Eigen::MatrixXd& m) {
  atomic_write(path, [&](std::ostream& os) { write_matrix(os, m); });
}

Eigen::MatrixXd read_matrix_file(const fs::path& path) {
  std::ifstream is = open_in(path);
  return read_matrix(is, path.string());
}

void write_labels(const fs::path& path, const std::vector<int>& labels) {
  atomic_write(path, [&](std::ostream& os) {
    for (const int y : labels) os << y << '\n';
  });
}

std::vector<int> read_labels(const fs::path& path) {
  std::ifstream is = open_in(path);
  std::vector<int> labels;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == '#') continue;
    labels.push_back(static_cast<int>(parse_long(tok, path.string())));
    std::string extra;
    if (ls >> extra) throw InputError(path.string() + ": one label per line expected");
  }
  if (labels.empty()) throw InputError(path.string() + ": no labels");
  return labels;
}

void write_dataset(const fs::path& dir, const Dataset& ds) {
  fs::create_directories(dir);
  write_matrix_file(dir / "features.txt", ds.features);
  write_matrix_file(dir / "class_attr.txt", ds.class_attr);
  if (ds.sample_attrs.size() != 0) write_matrix_file(dir / "sample_attrs.txt", ds.sample_attrs);
  write_labels(dir / "labels.txt", ds.labels);
  atomic_write(dir / "split.txt", [&](std::ostream& os) {
    os << "seen";
    for (const int id : ds.seen_classes) os << ' ' << id;
    os << "\nunseen";
    for (const int id : ds.unseen_classes) os << ' ' << id;
    os << '\n';
  });
}

Dataset read_dataset(const fs::path& dir) {
  Dataset ds;
  ds.features = read_matrix_file(dir / "features.txt");
  ds.class_attr = read_matrix_file(dir / "class_attr.txt");
  if (fs::exists(dir / "sample_attrs.txt")) {
    ds.sample_attrs = read_matrix_file(dir / "sample_attrs.txt");
  }
  const auto labels = read_labels(dir / "labels.txt");
  ds.labels = labels;
  const auto split_path = dir / "split.txt";
  for (const auto& [key, values] : read_kv(split_path)) {
    std::set<int>* target = nullptr;
    if (key == "seen") target = &ds.seen_classes;
    else if (key == "unseen") target = &ds.unseen_classes;
    else throw InputError(split_path.string() + ": unknown key '" + key + "'");
    for (const auto& tok : values) {
      target->insert(static_cast<int>(parse_long(tok, split_path.string())));
    }
  }
  return ds;
}

TrainConfig read_train_config(const fs::path& path) {
  TrainConfig cfg;
  for (const auto& e : read_kv(path)) {
    const std::string ctx = path.string();
    const auto& key = e.first;
    if (key == "alpha") cfg.params.alpha = parse_double(single_value(e, ctx), ctx);
    else if (key == "beta") cfg.params.beta = parse_double(single_value(e, ctx), ctx);
    else if (key == "delta") cfg.params.delta = parse_double(single_value(e, ctx), ctx);
    else if (key == "eta") cfg.params.eta = parse_double(single_value(e, ctx), ctx);
    else if (key == "gamma") cfg.params.gamma = parse_double(single_value(e, ctx), ctx);
    else if (key == "lambda") cfg.params.lambda = parse_double(single_value(e, ctx), ctx);
    else if (key == "tau") cfg.params.tau = parse_double(single_value(e, ctx), ctx);
    else if (key == "k_l") cfg.params.k_latent = static_cast<int>(parse_long(single_value(e, ctx), ctx));
    else if (key == "k_r") cfg.params.k_residual = static_cast<int>(parse_long(single_value(e, ctx), ctx));
    else if (key == "max_iters") cfg.params.solver.max_iters = static_cast<int>(parse_long(single_value(e, ctx), ctx));
    else if (key == "rel_tol") cfg.params.solver.rel_tol = parse_double(single_value(e, ctx), ctx);
    else if (key == "jitter") cfg.params.solver.jitter = parse_double(single_value(e, ctx), ctx);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(single_value(e, ctx), ctx));
    else if (key == "epsilon") cfg.epsilon = parse_double(single_value(e, ctx), ctx);
    else if (key == "match_space") {
      const std::string v = single_value(e, ctx);
      if (v == "defined") cfg.match_space = MatchSpace::Defined;
      else if (v == "latent") cfg.match_space = MatchSpace::Latent;
      else throw InputError(ctx + ": match_space must be 'defined' or 'latent'");
    } else if (key == "residual_centers") {
      const std::string v = single_value(e, ctx);
      if (v == "codes") cfg.residual_centers = ResidualCenters::TrainingCodes;
      else if (v == "reinfer") cfg.residual_centers = ResidualCenters::Reinfer;
      else throw InputError(ctx + ": residual_centers must be 'codes' or 'reinfer'");
    } else {
      throw InputError(ctx + ": unknown key '" + key + "'");
    }
  }
  if (!(cfg.epsilon > 0.0)) throw InputError(path.string() + ": epsilon must be > 0");
  return cfg;
}

SearchPlan read_search_plan(const fs::path& path) {
  SearchPlan plan;
  auto grid = [&](const std::vector<std::string>& toks, const std::string& ctx) {
    std::vector<double> g;
    for (const auto& t : toks) g.push_back(parse_double(t, ctx));
    return g;
  };
  for (const auto& e : read_kv(path)) {
    const std::string ctx = path.string();
    const auto& key = e.first;
    if (key == "alpha") plan.alpha_grid = grid(e.second, ctx);
    else if (key == "beta") plan.beta_grid = grid(e.second, ctx);
    else if (key == "delta") plan.delta_grid = grid(e.second, ctx);
    else if (key == "eta") plan.eta_grid = grid(e.second, ctx);
    else if (key == "gamma") plan.gamma_grid = grid(e.second, ctx);
    else if (key == "lambda") plan.lambda_grid = grid(e.second, ctx);
    else if (key == "k_r") {
      plan.k_r_grid.clear();
      for (const auto& t : e.second) plan.k_r_grid.push_back(static_cast<int>(parse_long(t, ctx)));
    } else if (key == "folds") plan.fold_count = static_cast<int>(parse_long(single_value(e, ctx), ctx));
    else if (key == "seed") plan.seed = static_cast<std::uint64_t>(parse_long(single_value(e, ctx), ctx));
    else if (key == "k_l") plan.k_l = static_cast<int>(parse_long(single_value(e, ctx), ctx));
    else if (key == "tau") plan.tau = parse_double(single_value(e, ctx), ctx);
    else if (key == "max_iters") plan.solver.max_iters = static_cast<int>(parse_long(single_value(e, ctx), ctx));
    else if (key == "rel_tol") plan.solver.rel_tol = parse_double(single_value(e, ctx), ctx);
    else if (key == "jitter") plan.solver.jitter = parse_double(single_value(e, ctx), ctx);
    else throw InputError(ctx + ": unknown key '" + key + "'");
  }
  return plan;
}

namespace {

constexpr int kArchiveVersion = 1;

struct FactorFile {
  const char* name;
  const Eigen::MatrixXd* matrix;
};

void write_params_lines(std::ostream& os, const HyperParams& p) {
  os << "alpha " << fmt_double(p.alpha) << '\n'
     << "beta " << fmt_double(p.beta) << '\n'
     << "delta " << fmt_double(p.delta) << '\n'
     << "eta " << fmt_double(p.eta) << '\n'
     << "gamma " << fmt_double(p.gamma) << '\n'
     << "lambda " << fmt_double(p.lambda) << '\n'
     << "tau " << fmt_double(p.tau) << '\n'
     << "k_l " << p.k_latent << '\n'
     << "k_r " << p.k_residual << '\n'
     << "max_iters " << p.solver.max_iters << '\n'
     << "rel_tol " << fmt_double(p.solver.rel_tol) << '\n'
     << "jitter " << fmt_double(p.solver.jitter) << '\n';
}

}  // namespace

void save_model(const fs::path& dir, const AugmentedModel& model, const TrainTrace* trace) {
  if (dir.has_parent_path()) fs::create_directories(dir.parent_path());
  const fs::path tmp = tmp_sibling(dir);
  try {
    fs::create_directories(tmp);
    const FactorFile factors[] = {
        {"q_d", &model.lad.feature_dict},
        {"l", &model.lad.latent_codes},
        {"q_l", &model.lad.attr_proj},
        {"u", &model.lad.classifier},
        {"q_r", &model.residual.residual_dict},
        {"r_s", &model.residual.residual_codes},
        {"v", &model.residual.residual_classifier},
        {"w", &model.residual.latent_predictor},
        {"r_o", &model.residual.class_centers},
        {"class_attr_seen", &model.class_attr_seen},
    };
    for (const auto& f : factors) {
      std::ofstream os(tmp / (std::string(f.name) + ".txt"));
      if (!os) throw IoError("cannot write factor " + std::string(f.name));
      write_matrix(os, *f.matrix);
      os.flush();
      if (!os) throw IoError("write of factor " + std::string(f.name) + " failed");
    }
    {
      std::ofstream os(tmp / "manifest.txt");
      if (!os) throw IoError("cannot write model manifest");
      os << "format_version " << kArchiveVersion << '\n';
      write_params_lines(os, model.params);
      os << "seen_classes";
      for (const int id : model.seen_class_order) os << ' ' << id;
      os << '\n';
      os << "k_features " << model.lad.feature_dict.rows() << '\n'
         << "k_defined " << model.class_attr_seen.rows() << '\n'
         << "n_train " << model.lad.latent_codes.cols() << '\n';
      os.flush();
      if (!os) throw IoError("write of model manifest failed");
    }
    if (trace) {
      std::ofstream os(tmp / "trace.txt");
      if (!os) throw IoError("cannot write training trace");
      os << "# stage sweep objective [surrogate]\n";
      os << "lad 0 " << fmt_double(trace->lad_initial_objective) << '\n';
      for (std::size_t i = 0; i < trace->lad_objectives.size(); ++i) {
        os << "lad " << (i + 1) << ' ' << fmt_double(trace->lad_objectives[i]) << '\n';
      }
      for (std::size_t i = 0; i < trace->residual_surrogate.size(); ++i) {
        os << "residual " << (i + 1) << ' ' << fmt_double(trace->residual_surrogate[i]) << ' '
           << fmt_double(trace->residual_objective[i]) << '\n';
      }
    }
    if (fs::exists(dir)) fs::remove_all(dir);
    fs::rename(tmp, dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
}

AugmentedModel load_model(const fs::path& dir) {
  AugmentedModel model;
  const fs::path manifest = dir / "manifest.txt";
  long k_features = -1, k_defined = -1, n_train = -1;
  bool version_seen = false;
  TrainConfig cfg;  // reuse the params parser keys
  for (const auto& e : read_kv(manifest)) {
    const std::string ctx = manifest.string();
    if (e.first == "format_version") {
      const long v = parse_long(single_value(e, ctx), ctx);
      if (v != kArchiveVersion) {
        throw InputError(ctx + ": unsupported format_version " + std::to_string(v));
      }
      version_seen = true;
    } else if (e.first == "seen_classes") {
      for (const auto& tok : e.second) {
        model.seen_class_order.push_back(static_cast<int>(parse_long(tok, ctx)));
      }
    } else if (e.first == "k_features") k_features = parse_long(single_value(e, ctx), ctx);
    else if (e.first == "k_defined") k_defined = parse_long(single_value(e, ctx), ctx);
    else if (e.first == "n_train") n_train = parse_long(single_value(e, ctx), ctx);
    else if (e.first == "alpha") cfg.params.alpha = parse_double(single_value(e, ctx), ctx);
    else if (e.first == "beta") cfg.params.beta = parse_double(single_value(e, ctx), ctx);
    else if (e.first == "delta") cfg.params.delta = parse_double(single_value(e, ctx), ctx);
    else if (e.first == "eta") cfg.params.eta = parse_double(single_value(e, ctx), ctx);
    else if (e.first == "gamma") cfg.params.gamma = parse_double(single_value(e, ctx), ctx);
    else if (e.first == "lambda") cfg.params.lambda = parse_double(single_value(e, ctx), ctx);
    else if (e.first == "tau") cfg.params.tau = parse_double(single_value(e, ctx), ctx);
    else if (e.first == "k_l") cfg.params.k_latent = static_cast<int>(parse_long(single_value(e, ctx), ctx));
    else if (e.first == "k_r") cfg.params.k_residual = static_cast<int>(parse_long(single_value(e, ctx), ctx));
    else if (e.first == "max_iters") cfg.params.solver.max_iters = static_cast<int>(parse_long(single_value(e, ctx), ctx));
    else if (e.first == "rel_tol") cfg.params.solver.rel_tol = parse_double(single_value(e, ctx), ctx);
    else if (e.first == "jitter") cfg.params.solver.jitter = parse_double(single_value(e, ctx), ctx);
    else throw InputError(ctx + ": unknown key '" + e.first + "'");
  }
  if (!version_seen) throw InputError(manifest.string() + ": missing format_version");
  model.params = cfg.params;

  model.lad.feature_dict = read_matrix_file(dir / "q_d.txt");
  model.lad.latent_codes = read_matrix_file(dir / "l.txt");
  model.lad.attr_proj = read_matrix_file(dir / "q_l.txt");
  model.lad.classifier = read_matrix_file(dir / "u.txt");
  model.residual.residual_dict = read_matrix_file(dir / "q_r.txt");
  model.residual.residual_codes = read_matrix_file(dir / "r_s.txt");
  model.residual.residual_classifier = read_matrix_file(dir / "v.txt");
  model.residual.latent_predictor = read_matrix_file(dir / "w.txt");
  model.residual.class_centers = read_matrix_file(dir / "r_o.txt");
  model.class_attr_seen = read_matrix_file(dir / "class_attr_seen.txt");

  const auto c_s = static_cast<Eigen::Index>(model.seen_class_order.size());
  const auto k_l = static_cast<Eigen::Index>(model.params.k_latent);
  const auto k_r = static_cast<Eigen::Index>(model.params.k_residual);
  auto expect = [&](const char* name, const Eigen::MatrixXd& m, Eigen::Index rows,
                    Eigen::Index cols) {
    if (m.rows() != rows || m.cols() != cols) {
      throw InputError(dir.string() + ": " + name + ".txt is " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + ", manifest implies " + std::to_string(rows) +
                       "x" + std::to_string(cols));
    }
  };
  expect("q_d", model.lad.feature_dict, k_features, k_l);
  expect("l", model.lad.latent_codes, k_l, n_train);
  expect("q_l", model.lad.attr_proj, k_l, k_defined);
  expect("u", model.lad.classifier, c_s, k_l);
  expect("q_r", model.residual.residual_dict, k_features, k_r);
  expect("r_s", model.residual.residual_codes, k_r, n_train);
  expect("v", model.residual.residual_classifier, c_s, k_r);
  expect("w", model.residual.latent_predictor, k_r, k_l);
  expect("r_o", model.residual.class_centers, k_r, c_s);
  expect("class_attr_seen", model.class_attr_seen, k_defined, c_s);
  return model;
}

void write_predictions(const fs::path& path, const std::vector<PredictionRow>& rows) {
  atomic_write(path, [&](std::ostream& os) {
    for (const auto& r : rows) {
      os << r.sample_id << ' ' << r.predicted << ' ' << fmt_double(r.conf_d) << ' '
         << fmt_double(r.conf_r) << ' ' << fmt_double(r.conf) << '\n';
    }
  });
}

std::vector<PredictionRow> read_predictions(const fs::path& path) {
  std::ifstream is = open_in(path);
  std::vector<PredictionRow> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string a, b, c, d, e;
    if (!(ls >> a)) continue;
    if (a[0] == '#') continue;
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    if (!(ls >> b >> c >> d >> e)) throw InputError(ctx + ": expected 5 fields");
    std::string extra;
    if (ls >> extra) throw InputError(ctx + ": expected 5 fields");
    rows.push_back({parse_long(a, ctx), static_cast<int>(parse_long(b, ctx)),
                    parse_double(c, ctx), parse_double(d, ctx), parse_double(e, ctx)});
  }
  if (rows.empty()) throw InputError(path.string() + ": no prediction rows");
  return rows;
}

std::vector<ExternalRow> read_external(const fs::path& path) {
  std::ifstream is = open_in(path);
  std::vector<ExternalRow> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!(ls >> a)) continue;
    if (a[0] == '#') continue;
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    if (!(ls >> b >> c)) throw InputError(ctx + ": expected 3 fields");
    std::string extra;
    if (ls >> extra) throw InputError(ctx + ": expected 3 fields");
    rows.push_back({parse_long(a, ctx), static_cast<int>(parse_long(b, ctx)),
                    parse_double(c, ctx)});
  }
  if (rows.empty()) throw InputError(path.string() + ": no rows");
  return rows;
}

void write_curve_csv(const fs::path& path, const RiskCoverageCurve& curve) {
  atomic_write(path, [&](std::ostream& os) {
    for (const auto& p : curve.points) {
      os << fmt_double(p.coverage) << ',' << fmt_double(p.risk) << '\n';
    }
    os << "AURCC," << fmt_double(curve.aurcc) << '\n';
  });
}

void write_curve_svg(const fs::path& path, const RiskCoverageCurve& curve) {
  const double width = 560, height = 420;
  const double left = 70, right = 530, top = 30, bottom = 370;
  auto px = [&](double coverage) { return left + coverage * (right - left); };
  auto py = [&](double risk) { return bottom - risk * (bottom - top); };

  atomic_write(path, [&](std::ostream& os) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double v = i / 5.0;
      os << "  <line x1=\"" << px(v) << "\" y1=\"" << py(0) << "\" x2=\"" << px(v) << "\" y2=\""
         << py(1) << "\" stroke=\"#dddddd\"/>\n";
      os << "  <line x1=\"" << px(0) << "\" y1=\"" << py(v) << "\" x2=\"" << px(1) << "\" y2=\""
         << py(v) << "\" stroke=\"#dddddd\"/>\n";
      os << "  <text x=\"" << px(v) << "\" y=\"" << bottom + 18
         << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt_double(v) << "</text>\n";
      os << "  <text x=\"" << left - 8 << "\" y=\"" << py(v) + 4
         << "\" font-size=\"11\" text-anchor=\"end\">" << fmt_double(v) << "</text>\n";
    }
    os << "  <line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\""
       << py(0) << "\" stroke=\"black\"/>\n";
    os << "  <line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\""
       << py(1) << "\" stroke=\"black\"/>\n";
    os << "  <text x=\"" << (left + right) / 2 << "\" y=\"" << height - 8
       << "\" font-size=\"13\" text-anchor=\"middle\">coverage</text>\n";
    os << "  <text x=\"16\" y=\"" << (top + bottom) / 2
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (top + bottom) / 2 << ")\">risk</text>\n";

    os << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    if (!curve.points.empty()) {
      os << px(0) << ',' << py(curve.points.front().risk) << ' ';
      for (const auto& p : curve.points) os << px(p.coverage) << ',' << py(p.risk) << ' ';
    }
    os << "\"/>\n";
    os << "  <text x=\"" << left + 10 << "\" y=\"" << top + 14 << "\" font-size=\"12\">AURCC = "
       << fmt_double(curve.aurcc) << "</text>\n";
    os << "</svg>\n";
  });
}

void write_search_result(const fs::path& path, const SearchResult& result,
                         const SearchPlan& plan) {
  atomic_write(path, [&](std::ostream& os) {
    write_params_lines(os, result.chosen);
    os << "seed " << plan.seed << '\n';
    os << "# score table: stage config mean_aurcc\n";
    for (const auto& e : result.table) {
      os << "# score stage=" << e.stage << ' ' << e.config << ' '
         << (e.feasible ? fmt_double(e.mean_aurcc) : std::string("infeasible")) << '\n';
    }
  });
}

}  // namespace szsc
