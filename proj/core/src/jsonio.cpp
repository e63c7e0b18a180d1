#include <nlohmann/json.hpp>

#include "staudt/config.hpp"

namespace staudt {

using ojson = nlohmann::ordered_json;

namespace {

ojson scalar_json(const Scalar& s) {
  if (s.spec()->rational()) return ojson(s.rat().get_num().get_str() + "/" + s.rat().get_den().get_str());
  ojson arr = ojson::array();
  for (auto c : s.coeffs()) arr.push_back(c);
  return arr;
}

Scalar scalar_from_json(const ojson& j, const FieldPtr& f) {
  if (f->rational()) {
    if (!j.is_string()) fail(Err::SchemaError, "rational scalar must be a string");
    std::string s = j.get<std::string>();
    auto slash = s.find('/');
    if (slash == std::string::npos) fail(Err::SchemaError, "rational scalar missing '/'");
    mpq_class q(mpz_class(s.substr(0, slash)), mpz_class(s.substr(slash + 1)));
    q.canonicalize();
    return Scalar::of_rational(q);
  }
  if (!j.is_array()) fail(Err::SchemaError, "finite-field scalar must be an array");
  std::vector<std::uint64_t> c;
  for (const auto& x : j) c.push_back(x.get<std::uint64_t>());
  return Scalar::from_coeffs(f, c);
}

ojson triple_json(const std::array<Scalar, 3>& t) {
  ojson arr = ojson::array();
  for (const auto& s : t) arr.push_back(scalar_json(s));
  return arr;
}

std::array<Scalar, 3> triple_from_json(const ojson& j, const FieldPtr& f) {
  if (!j.is_array() || j.size() != 3) fail(Err::SchemaError, "coordinate triple expected");
  return {scalar_from_json(j[0], f), scalar_from_json(j[1], f), scalar_from_json(j[2], f)};
}

}  // namespace

std::string config_to_json(const Configuration& cfg, const std::string& program_text,
                           const std::vector<std::string>& witness) {
  ojson j;
  const FieldPtr& f = cfg.field();
  ojson jf;
  jf["characteristic"] = f->characteristic;
  jf["degree"] = f->degree;
  if (!f->modulus.empty()) {
    ojson m = ojson::array();
    for (auto c : f->modulus) m.push_back(c);
    jf["modulus"] = m;
  }
  j["field"] = jf;

  ojson pts = ojson::array();
  for (const auto& mp : cfg.points()) {
    ojson p;
    p["id"] = mp.id;
    p["label"] = mp.label;
    p["role"] = role_name(mp.role);
    p["coords"] = triple_json(mp.pt.c);
    p["provenance"] = mp.provenance;
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);

  ojson lns = ojson::array();
  for (const auto& ml : cfg.lines()) {
    ojson l;
    l["id"] = ml.id;
    l["label"] = ml.label;
    l["role"] = role_name(ml.role);
    l["coeffs"] = triple_json(ml.ln.c);
    if (ml.framing) {
      ojson fr;
      fr["labels"] = ojson::array({scalar_json(ml.framing->labels[0]), scalar_json(ml.framing->labels[1])});
      fr["points"] = ojson::array({ml.framing->point_ids[0], ml.framing->point_ids[1]});
      fr["variable"] = ml.framing->variable_point_id;
      l["framing"] = std::move(fr);
    } else {
      l["framing"] = nullptr;
    }
    if (ml.intercept)
      l["y_intercept"] = scalar_json(*ml.intercept);
    else
      l["y_intercept"] = nullptr;
    lns.push_back(std::move(l));
  }
  j["lines"] = std::move(lns);

  // dense matrix, one row per point; rows are 0/1 strings to keep multi-
  // megabyte files tractable
  ojson inc = ojson::array();
  const std::size_t L = cfg.lines().size();
  for (const auto& mp : cfg.points()) {
    std::string row(L, '0');
    for (int lid : cfg.lines_of_point(mp.id)) row[static_cast<std::size_t>(lid)] = '1';
    inc.push_back(std::move(row));
  }
  j["incidence"] = std::move(inc);

  ojson trs = ojson::array();
  for (const auto& t : cfg.traces()) {
    ojson jt;
    jt["id"] = t.id;
    jt["kind"] = t.kind;
    jt["input_points"] = t.input_points;
    jt["input_lines"] = t.input_lines;
    ojson draws = ojson::array();
    for (const auto& d : t.draws) {
      ojson jd;
      jd["purpose"] = d.purpose;
      jd["value"] = scalar_json(d.value);
      jd["forbidden_size"] = d.forbidden_size;
      draws.push_back(std::move(jd));
    }
    jt["draws"] = std::move(draws);
    jt["out_points"] = t.out_points;
    jt["out_lines"] = t.out_lines;
    jt["relation"] = t.relation;
    trs.push_back(std::move(jt));
  }
  j["traces"] = std::move(trs);

  j["free_count"] = cfg.free_count();
  j["seed"] = cfg.seed();
  j["program"] = program_text;
  j["witness"] = witness;
  return j.dump(1) + "\n";
}

LoadedConfig config_from_json(const std::string& bytes) {
  ojson j;
  try {
    j = ojson::parse(bytes);
  } catch (const std::exception& e) {
    fail(Err::SchemaError, std::string("bad JSON: ") + e.what());
  }
  try {
    const auto& jf = j.at("field");
    std::uint64_t p = jf.at("characteristic").get<std::uint64_t>();
    std::uint32_t k = jf.at("degree").get<std::uint32_t>();
    FieldPtr f = make_field(p, k);
    if (jf.contains("modulus")) {
      std::vector<std::uint64_t> m;
      for (const auto& c : jf.at("modulus")) m.push_back(c.get<std::uint64_t>());
      if (m != f->modulus) fail(Err::SchemaError, "modulus does not match canonical modulus");
    }

    Configuration cfg(f, j.at("seed").get<std::uint64_t>());
    for (const auto& jp : j.at("points")) {
      MarkedPoint mp;
      mp.id = jp.at("id").get<int>();
      if (mp.id != static_cast<int>(cfg.points_.size()))
        fail(Err::SchemaError, "non-sequential point ids");
      mp.label = jp.at("label").get<std::string>();
      mp.role = point_role_of(jp.at("role").get<std::string>());
      mp.pt = PPoint{triple_from_json(jp.at("coords"), f)};
      mp.provenance = jp.at("provenance").get<std::string>();
      if (cfg.find_point(mp.pt)) fail(Err::SchemaError, "duplicate point coordinates");
      if (mp.role == PointRole::Bystander) ++cfg.bystanders_;
      cfg.point_index_.emplace(Configuration::PointKey{mp.pt}, mp.id);
      cfg.points_.push_back(std::move(mp));
      cfg.point_lines_.emplace_back();
    }
    for (const auto& jl : j.at("lines")) {
      MarkedLine ml;
      ml.id = jl.at("id").get<int>();
      if (ml.id != static_cast<int>(cfg.lines_.size()))
        fail(Err::SchemaError, "non-sequential line ids");
      ml.label = jl.at("label").get<std::string>();
      ml.role = line_role_of(jl.at("role").get<std::string>());
      ml.ln = PLine{triple_from_json(jl.at("coeffs"), f)};
      if (!jl.at("framing").is_null()) {
        const auto& fr = jl.at("framing");
        LineFraming lf;
        lf.labels = {scalar_from_json(fr.at("labels")[0], f), scalar_from_json(fr.at("labels")[1], f)};
        lf.point_ids = {fr.at("points")[0].get<int>(), fr.at("points")[1].get<int>()};
        lf.variable_point_id = fr.at("variable").get<int>();
        ml.framing = lf;
      }
      if (!jl.at("y_intercept").is_null())
        ml.intercept = scalar_from_json(jl.at("y_intercept"), f);
      if (cfg.find_line(ml.ln)) fail(Err::SchemaError, "duplicate line coefficients");
      cfg.line_index_.emplace(Configuration::LineKey{ml.ln}, ml.id);
      cfg.lines_.push_back(std::move(ml));
      cfg.line_points_.emplace_back();
    }
    const auto& inc = j.at("incidence");
    if (inc.size() != cfg.points_.size()) fail(Err::SchemaError, "incidence row count mismatch");
    for (std::size_t pid = 0; pid < inc.size(); ++pid) {
      std::string row = inc[pid].get<std::string>();
      if (row.size() != cfg.lines_.size()) fail(Err::SchemaError, "incidence row width mismatch");
      for (std::size_t lid = 0; lid < row.size(); ++lid) {
        if (row[lid] == '1') {
          cfg.point_lines_[pid].push_back(static_cast<int>(lid));
          cfg.line_points_[lid].push_back(static_cast<int>(pid));
        } else if (row[lid] != '0') {
          fail(Err::SchemaError, "incidence rows must be 0/1 strings");
        }
      }
    }
    for (const auto& jt : j.at("traces")) {
      GadgetTrace t;
      t.id = jt.at("id").get<int>();
      t.kind = jt.at("kind").get<std::string>();
      t.input_points = jt.at("input_points").get<std::vector<int>>();
      t.input_lines = jt.at("input_lines").get<std::vector<int>>();
      for (const auto& jd : jt.at("draws")) {
        DrawRecord d;
        d.purpose = jd.at("purpose").get<std::string>();
        d.value = scalar_from_json(jd.at("value"), f);
        d.forbidden_size = jd.at("forbidden_size").get<std::uint64_t>();
        t.draws.push_back(std::move(d));
      }
      t.out_points = jt.at("out_points").get<std::vector<int>>();
      t.out_lines = jt.at("out_lines").get<std::vector<int>>();
      t.relation = jt.at("relation").get<std::string>();
      cfg.traces_.push_back(std::move(t));
    }
    cfg.free_count_ = j.at("free_count").get<std::uint64_t>();

    LoadedConfig out{std::move(cfg), j.at("program").get<std::string>(),
                     j.at("witness").get<std::vector<std::string>>()};
    return out;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(Err::SchemaError, std::string("malformed configuration: ") + e.what());
  }
}

}  // namespace staudt
