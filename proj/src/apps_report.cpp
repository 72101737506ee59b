#include <cstdio>
#include <sstream>

#include "conclab/apps.hpp"
#include "json.hpp"

namespace conclab {

std::string AppReport::to_json() const {
  nlohmann::json j;
  j["app"] = app;
  j["seed"] = seed;
  nlohmann::json p = nlohmann::json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["params"] = std::move(p);
  nlohmann::json secs = nlohmann::json::array();
  for (const auto& s : sections) {
    nlohmann::json sec;
    sec["name"] = s.name;
    sec["statistic"] = s.tail.statistic;
    sec["n"] = s.tail.n;
    sec["median"] = s.tail.median;
    sec["median_ci"] = {s.tail.median_lo, s.tail.median_hi};
    nlohmann::json rows = nlohmann::json::array();
    for (size_t i = 0; i < s.tail.rows.size(); ++i) {
      const auto& t = s.tail.rows[i];
      nlohmann::json row = {{"u", t.u},
                            {"count", t.count},
                            {"point", t.point},
                            {"cp_upper", t.cp_upper}};
      if (i < s.rows.size()) {
        row["bound"] = s.rows[i].bound;
        row["vacuous"] = s.rows[i].vacuous;
        row["pass"] = s.rows[i].pass;
        if (!s.rows[i].note.empty()) row["note"] = s.rows[i].note;
      }
      rows.push_back(std::move(row));
    }
    sec["rows"] = std::move(rows);
    secs.push_back(std::move(sec));
  }
  j["sections"] = std::move(secs);
  nlohmann::json aux_json = nlohmann::json::object();
  for (const auto& [k, v] : aux) aux_json[k] = v;
  j["aux"] = std::move(aux_json);
  if (!note.empty()) j["note"] = note;
  j["verdict"] = pass ? "pass" : "fail";
  return j.dump();
}

std::string AppReport::to_csv() const {
  std::ostringstream os;
  os << "app,section,u,count,n,point,cp_upper,bound,vacuous,pass\n";
  char buf[512];
  for (const auto& s : sections) {
    for (size_t i = 0; i < s.tail.rows.size(); ++i) {
      const auto& t = s.tail.rows[i];
      const bool have = i < s.rows.size();
      std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%lld,%lld,%.17g,%.17g,%.17g,%d,%d\n",
                    app.c_str(), s.name.c_str(), t.u, (long long)t.count, (long long)t.n,
                    t.point, t.cp_upper, have ? s.rows[i].bound : 0.0,
                    have && s.rows[i].vacuous ? 1 : 0, have && s.rows[i].pass ? 1 : 0);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace conclab
