#include "blinkword/frame_source.hpp"

#include <fstream>
#include <sstream>

#include "blinkword/errors.hpp"
#include "blinkword/pgm.hpp"

namespace blinkword {

DirectorySource::DirectorySource(const std::filesystem::path& dir)
    : paths_(list_stream_directory(dir)) {}

std::optional<Frame> DirectorySource::next() {
  if (cursor_ >= paths_.size()) return std::nullopt;
  const std::size_t index = cursor_++;
  try {
    return read_pgm(paths_[index], 0, index);
  } catch (const StreamError&) {
    throw;
  } catch (const Error& e) {
    throw StreamError(e.what(), index);
  }
}

std::vector<ScriptSegment> parse_script(const std::string& text) {
  std::vector<ScriptSegment> script;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string state;
    if (!(fields >> state)) continue;
    std::int64_t duration = 0;
    std::string extra;
    if (!(fields >> duration) || (fields >> extra) || duration <= 0) {
      throw ArgumentError("script line " + std::to_string(line_no) +
                          ": expected '<open|closed> <positive duration_ms>'");
    }
    script.push_back({eye_state_from_string(state), duration});
  }
  return script;
}

std::vector<ScriptSegment> load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open script " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_script(buffer.str());
}

std::vector<EyeState> script_states(const std::vector<ScriptSegment>& script, int fps) {
  std::vector<EyeState> states;
  for (const auto& seg : script) {
    states.insert(states.end(), static_cast<std::size_t>(frames_for_duration(seg.duration_ms, fps)),
                  seg.state);
  }
  return states;
}

ScriptSource::ScriptSource(std::vector<ScriptSegment> script, int fps, std::uint64_t seed,
                           SyntheticParams params)
    : states_(script_states(script, fps)), fps_(fps), rng_(seed), params_(params) {}

std::optional<Frame> ScriptSource::next() {
  if (cursor_ >= states_.size()) return std::nullopt;
  const std::size_t index = cursor_++;
  return render_eye(states_[index], rng_, params_, replay_timestamp_ms(index, fps_), index);
}

LiveSource::LiveSource(std::istream& in) : in_(in) {}

std::optional<Frame> LiveSource::next() {
  std::vector<std::uint8_t> pixels(kFramePixels);
  in_.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(kFramePixels));
  const auto got = static_cast<std::size_t>(in_.gcount());
  if (got == 0) return std::nullopt;
  if (got != kFramePixels) {
    throw StreamError("partial frame: " + std::to_string(got) + " of 5600 bytes", index_);
  }
  return Frame(std::move(pixels), 0, index_++);
}

}  // namespace blinkword
