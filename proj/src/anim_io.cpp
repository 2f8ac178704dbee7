#include "vmocap/anim_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "vmocap/error.hpp"
#include "vmocap/serialize.hpp"

namespace vmocap {

using nlohmann::json;

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::optional<double> parse_double(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || end != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_count(std::string_view tok) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || end != tok.data() + tok.size()) return std::nullopt;
  return v;
}

// Whitespace tokenizer that splits braces into their own tokens and tracks
// 1-based line numbers.
class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  struct Token {
    std::string_view text;
    std::size_t line = 0;
  };

  std::optional<Token> next() {
    skip_space();
    if (pos_ >= text_.size()) return std::nullopt;
    const std::size_t start = pos_;
    if (text_[pos_] == '{' || text_[pos_] == '}') {
      ++pos_;
    } else {
      while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '{' && text_[pos_] != '}') ++pos_;
    }
    return Token{text_.substr(start, pos_ - start), line_};
  }

  Token expect(std::string_view what) {
    auto tok = next();
    if (!tok) throw ParseError("unexpected end of input, expected " + std::string(what), line_);
    return *tok;
  }

  void expect_keyword(std::string_view keyword) {
    const Token tok = expect(keyword);
    if (!iequals(tok.text, keyword)) {
      throw ParseError("expected '" + std::string(keyword) + "', found '" + std::string(tok.text) + "'", tok.line);
    }
  }

  double expect_number(std::string_view what) {
    const Token tok = expect(what);
    auto v = parse_double(tok.text);
    if (!v) throw ParseError("expected numeric " + std::string(what) + ", found '" + std::string(tok.text) + "'", tok.line);
    return *v;
  }

  // Drops the rest of the current line.
  void skip_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  std::string_view rest() const { return text_.substr(pos_); }
  std::size_t line() const { return line_; }

 private:
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

void parse_hierarchy(Tokenizer& tz, Skeleton& skeleton) {
  tz.expect_keyword("HIERARCHY");
  tz.expect_keyword("ROOT");

  std::unordered_set<std::string> names;
  auto add_joint = [&](std::string name, std::optional<std::size_t> parent, std::size_t line) {
    if (!names.insert(name).second) throw ParseError("duplicate joint name '" + name + "'", line);
    Joint j;
    j.name = std::move(name);
    j.parent = parent;
    skeleton.joints.push_back(std::move(j));
    return skeleton.joints.size() - 1;
  };

  {
    const auto name = tz.expect("root name");
    add_joint(std::string(name.text), std::nullopt, name.line);
    tz.expect_keyword("{");
  }

  std::vector<std::size_t> stack = {0};
  std::vector<bool> has_offset = {false};
  while (!stack.empty()) {
    const auto tok = tz.expect("'}'");
    const std::size_t current = stack.back();
    Joint& joint = skeleton.joints[current];

    if (iequals(tok.text, "OFFSET")) {
      for (int a = 0; a < 3; ++a) joint.rest_offset[a] = tz.expect_number("OFFSET component");
      has_offset[current] = true;
    } else if (iequals(tok.text, "CHANNELS")) {
      const auto count_tok = tz.expect("channel count");
      const auto count = parse_count(count_tok.text);
      if (!count || *count > 6) {
        throw ParseError("invalid channel count '" + std::string(count_tok.text) + "'", count_tok.line);
      }
      joint.channels.clear();
      for (std::size_t c = 0; c < *count; ++c) {
        const auto ch_tok = tz.expect("channel name");
        std::optional<Channel> ch;
        for (int k = 0; k < 6 && !ch; ++k) {
          if (iequals(ch_tok.text, channel_name(static_cast<Channel>(k)))) ch = static_cast<Channel>(k);
        }
        if (!ch) throw ParseError("unknown channel '" + std::string(ch_tok.text) + "'", ch_tok.line);
        joint.channels.push_back(*ch);
      }
    } else if (iequals(tok.text, "JOINT")) {
      const auto name = tz.expect("joint name");
      const std::size_t idx = add_joint(std::string(name.text), current, name.line);
      tz.expect_keyword("{");
      stack.push_back(idx);
      has_offset.push_back(false);
    } else if (iequals(tok.text, "End")) {
      tz.expect_keyword("Site");
      const std::size_t idx = add_joint(joint.name + "_end", current, tok.line);
      tz.expect_keyword("{");
      tz.expect_keyword("OFFSET");
      for (int a = 0; a < 3; ++a) skeleton.joints[idx].rest_offset[a] = tz.expect_number("OFFSET component");
      tz.expect_keyword("}");
      has_offset.push_back(true);
    } else if (tok.text == "}") {
      if (!has_offset[current]) throw ParseError("joint '" + joint.name + "' has no OFFSET", tok.line);
      stack.pop_back();
    } else if (iequals(tok.text, "ROOT")) {
      throw ParseError("multiple ROOT hierarchies are not supported", tok.line);
    } else {
      throw ParseError("unexpected token '" + std::string(tok.text) + "' in joint '" + joint.name + "'", tok.line);
    }
  }
}

void parse_motion(Tokenizer& tz, AnimationClip& clip) {
  tz.expect_keyword("MOTION");
  tz.expect_keyword("Frames:");
  const auto frames_tok = tz.expect("frame count");
  const auto declared = parse_count(frames_tok.text);
  if (!declared) throw ParseError("invalid frame count '" + std::string(frames_tok.text) + "'", frames_tok.line);
  tz.expect_keyword("Frame");
  tz.expect_keyword("Time:");
  const auto time_tok = tz.expect("frame time");
  const auto frame_time = parse_double(time_tok.text);
  if (!frame_time || *frame_time <= 0.0) {
    throw ParseError("frame time must be a positive number, found '" + std::string(time_tok.text) + "'", time_tok.line);
  }
  clip.frame_time = *frame_time;
  tz.skip_line();

  const std::size_t channels = clip.skeleton.channel_count();
  std::string_view rest = tz.rest();
  std::size_t line = tz.line();
  std::size_t last_data_line = time_tok.line;

  while (!rest.empty()) {
    // `rest` starts at the newline ending the previous line.
    if (rest.front() == '\n') {
      rest.remove_prefix(1);
      ++line;
    }
    const std::size_t eol = std::min(rest.find('\n'), rest.size());
    std::string_view text = rest.substr(0, eol);
    rest.remove_prefix(eol);

    LocalPose pose;
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && is_space(text[i])) ++i;
      if (i >= text.size()) break;
      const std::size_t start = i;
      while (i < text.size() && !is_space(text[i])) ++i;
      const std::string_view tok = text.substr(start, i - start);
      const auto v = parse_double(tok);
      if (!v) throw ParseError("non-numeric motion value '" + std::string(tok) + "'", line);
      pose.values.push_back(*v);
    }
    if (pose.values.empty()) continue;
    if (pose.values.size() != channels) {
      throw ParseError("motion line has " + std::to_string(pose.values.size()) + " values, hierarchy declares " +
                           std::to_string(channels) + " channels",
                       line);
    }
    if (clip.frames.size() == *declared) {
      throw ParseError("more motion lines than the declared " + std::to_string(*declared) + " frames", line);
    }
    clip.frames.push_back(std::move(pose));
    last_data_line = line;
  }
  if (clip.frames.size() != *declared) {
    throw ParseError("header declares " + std::to_string(*declared) + " frames, found " +
                         std::to_string(clip.frames.size()),
                     last_data_line);
  }
  if (clip.frames.empty()) throw ParseError("clip has no frames", frames_tok.line);
}

void write_joint_bvh(const AnimationClip& clip, const std::vector<std::vector<std::size_t>>& children, std::size_t j,
                     int depth, std::ostream& out) {
  const Joint& joint = clip.skeleton.joints[j];
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  auto num = [](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  const bool end_site = joint.parent && joint.channels.empty() && children[j].empty() &&
                        joint.name == clip.skeleton.joints[*joint.parent].name + "_end";
  if (end_site) {
    out << indent << "End Site\n" << indent << "{\n";
    out << indent << "  OFFSET " << num(joint.rest_offset.x()) << ' ' << num(joint.rest_offset.y()) << ' '
        << num(joint.rest_offset.z()) << '\n';
    out << indent << "}\n";
    return;
  }
  out << indent << (joint.parent ? "JOINT " : "ROOT ") << joint.name << '\n' << indent << "{\n";
  out << indent << "  OFFSET " << num(joint.rest_offset.x()) << ' ' << num(joint.rest_offset.y()) << ' '
      << num(joint.rest_offset.z()) << '\n';
  out << indent << "  CHANNELS " << joint.channels.size();
  for (Channel c : joint.channels) out << ' ' << channel_name(c);
  out << '\n';
  for (std::size_t c : children[j]) write_joint_bvh(clip, children, c, depth + 1, out);
  out << indent << "}\n";
}

}  // namespace

void validate_clip(const AnimationClip& clip) {
  require_valid(clip.skeleton);
  if (!(clip.frame_time > 0.0) || !std::isfinite(clip.frame_time)) {
    throw ValidationError("frame_time must be positive and finite");
  }
  if (clip.frames.empty()) throw ValidationError("clip has no frames");
  const std::size_t channels = clip.skeleton.channel_count();
  for (std::size_t f = 0; f < clip.frames.size(); ++f) {
    if (clip.frames[f].values.size() != channels) {
      throw ValidationError("frame " + std::to_string(f) + " has " + std::to_string(clip.frames[f].values.size()) +
                            " values, expected " + std::to_string(channels));
    }
  }
}

AnimationClip parse_bvh(std::string_view text) {
  Tokenizer tz(text);
  AnimationClip clip;
  parse_hierarchy(tz, clip.skeleton);
  parse_motion(tz, clip);
  const auto diagnostics = validate_skeleton(clip.skeleton);
  for (const auto& d : diagnostics) {
    if (d.severity == Diagnostic::Severity::Error) throw ParseError(d.message, 0);
  }
  return clip;
}

AnimationClip load_bvh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bvh(ss.str());
}

void write_bvh(const AnimationClip& clip, std::ostream& out) {
  validate_clip(clip);
  std::vector<std::vector<std::size_t>> children(clip.skeleton.size());
  for (std::size_t j = 1; j < clip.skeleton.size(); ++j) children[*clip.skeleton.joints[j].parent].push_back(j);

  out << "HIERARCHY\n";
  write_joint_bvh(clip, children, 0, 0, out);
  out << "MOTION\nFrames: " << clip.frames.size() << '\n';
  char buf[32];
  out << "Frame Time: " << std::string(buf, std::to_chars(buf, buf + sizeof buf, clip.frame_time).ptr) << '\n';
  for (const auto& frame : clip.frames) {
    for (std::size_t i = 0; i < frame.values.size(); ++i) {
      if (i) out << ' ';
      out << std::string_view(buf, std::to_chars(buf, buf + sizeof buf, frame.values[i]).ptr - buf);
    }
    out << '\n';
  }
}

void write_clip(const AnimationClip& clip, std::ostream& out) {
  validate_clip(clip);
  json frames = json::array();
  for (const auto& f : clip.frames) frames.push_back(f.values);
  const json doc = {{"format_version", kClipFormatVersion},
                    {"skeleton", to_json(clip.skeleton)},
                    {"frame_time", clip.frame_time},
                    {"frames", std::move(frames)}};
  out << doc.dump() << '\n';
}

AnimationClip read_clip(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed clip document: ") + e.what(), 0);
  }
  AnimationClip clip;
  try {
    if (!doc.contains("format_version") || doc.at("format_version").get<int>() != kClipFormatVersion) {
      throw ParseError("unsupported clip format_version (expected " + std::to_string(kClipFormatVersion) + ")", 0);
    }
    clip.skeleton = skeleton_from_json(doc.at("skeleton"));
    clip.frame_time = doc.at("frame_time").get<double>();
    for (const auto& f : doc.at("frames")) clip.frames.push_back({f.get<std::vector<double>>()});
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed clip document: ") + e.what(), 0);
  }
  try {
    validate_clip(clip);
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), 0);
  }
  return clip;
}

AnimationClip load_clip(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".bvh") return load_bvh(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_clip(in);
}

ClipStats clip_stats(const AnimationClip& clip) {
  validate_clip(clip);
  ClipStats s;
  s.joint_count = clip.skeleton.size();
  s.frame_count = clip.frames.size();
  s.duration = static_cast<double>(s.frame_count) * clip.frame_time;
  s.root_min = Vec3::Constant(std::numeric_limits<double>::infinity());
  s.root_max = -s.root_min;
  for (const auto& frame : clip.frames) {
    const Vec3 root = forward_kinematics(clip.skeleton, frame).positions[0];
    s.root_min = s.root_min.cwiseMin(root);
    s.root_max = s.root_max.cwiseMax(root);
  }
  return s;
}

}  // namespace vmocap
