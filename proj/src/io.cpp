#include "conclab/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace conclab {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

ProductSpace space_from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.contains("factors")) throw std::invalid_argument("space JSON needs \"factors\"");
  std::vector<std::vector<double>> ws;
  for (const auto& f : j.at("factors")) ws.push_back(f.get<std::vector<double>>());
  return make_space(ws);
}

Event event_from_json_text(const ProductSpace& s, const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.contains("points")) {
    std::vector<PointVec> pts;
    for (const auto& p : j.at("points")) {
      PointVec v;
      for (const auto& c : p) v.push_back(Symbol(c.get<unsigned>()));
      pts.push_back(std::move(v));
    }
    return make_event_points(s, pts);
  }
  if (j.contains("predicate")) {
    const std::string name = j.at("predicate").get<std::string>();
    if (name == "singleton") {
      PointVec v;
      for (const auto& c : j.at("point")) v.push_back(Symbol(c.get<unsigned>()));
      return event_from_predicate(s, name, 0, &v);
    }
    return event_from_predicate(s, name, j.at("k").get<long>(), nullptr);
  }
  throw std::invalid_argument("event JSON needs \"points\" or \"predicate\"");
}

ProductSpace space_from_cli(const std::string& text) {
  if (!text.empty() && text[0] == '@') return space_from_json_text(slurp(text.substr(1)));
  if (!text.empty() && text[0] == '{') return space_from_json_text(text);
  return space_from_shorthand(text);
}

Event event_from_cli(const ProductSpace& s, const std::string& text) {
  if (!text.empty() && text[0] == '@') return event_from_json_text(s, slurp(text.substr(1)));
  return event_from_json_text(s, text);
}

}  // namespace conclab
