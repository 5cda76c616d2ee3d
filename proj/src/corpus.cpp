#include "phraseprobe/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <random>

namespace phraseprobe {

Alignment::Alignment(std::vector<Link> links) : links_(std::move(links)) {
  std::sort(links_.begin(), links_.end());
  links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
}

void Alignment::insert(Link link) {
  auto it = std::lower_bound(links_.begin(), links_.end(), link);
  if (it == links_.end() || *it != link) links_.insert(it, link);
}

bool Alignment::contains(Link link) const {
  return std::binary_search(links_.begin(), links_.end(), link);
}

Alignment Alignment::transposed() const {
  std::vector<Link> flipped;
  flipped.reserve(links_.size());
  for (const Link& l : links_) flipped.push_back({l.target, l.source});
  return Alignment(std::move(flipped));
}

namespace {

bool parse_index(std::string_view text, int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && out >= 0;
}

}  // namespace

Alignment parse_pharaoh(std::string_view line, std::size_t line_number) {
  std::vector<Link> links;
  for (const std::string& token : split_tokens(line)) {
    auto dash = token.find('-');
    Link link;
    if (dash == std::string::npos ||
        !parse_index(std::string_view(token).substr(0, dash), link.source) ||
        !parse_index(std::string_view(token).substr(dash + 1), link.target)) {
      throw ParseError(at_line(line_number, "malformed alignment token '" + token + "'"));
    }
    links.push_back(link);
  }
  return Alignment(std::move(links));
}

std::string format_pharaoh(const Alignment& alignment) {
  std::string out;
  for (const Link& l : alignment) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(l.source);
    out.push_back('-');
    out += std::to_string(l.target);
  }
  return out;
}

Mask parse_mask(std::string_view line, std::size_t line_number) {
  Mask mask;
  for (const std::string& token : split_tokens(line)) {
    if (token == "0") {
      mask.push_back(0);
    } else if (token == "1") {
      mask.push_back(1);
    } else {
      throw ParseError(at_line(line_number, "mask value '" + token + "' is not 0 or 1"));
    }
  }
  return mask;
}

std::string format_mask(const Mask& mask) {
  std::string out;
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (j) out.push_back(' ');
    out.push_back(mask[j] ? '1' : '0');
  }
  return out;
}

void validate_alignment(const SentenceRecord& record, std::size_t line_number) {
  const int source_len = static_cast<int>(record.source.size());
  const int target_len = static_cast<int>(record.target.size());
  for (const Link& l : record.alignment) {
    if (l.source >= source_len || l.target >= target_len) {
      throw ValidationError(at_line(
          line_number, "alignment link " + std::to_string(l.source) + "-" +
                           std::to_string(l.target) + " out of range for " +
                           std::to_string(source_len) + "x" + std::to_string(target_len) +
                           " sentence pair"));
    }
  }
}

void validate_mask(const SentenceRecord& record, std::size_t line_number) {
  if (!record.mask) return;
  if (record.mask->size() != record.target.size()) {
    throw ValidationError(at_line(line_number, "mask length " + std::to_string(record.mask->size()) +
                                                   " differs from target length " +
                                                   std::to_string(record.target.size())));
  }
  for (std::uint8_t bit : *record.mask) {
    if (bit > 1) throw ValidationError(at_line(line_number, "mask bit outside {0,1}"));
  }
}

void validate(const SentenceRecord& record, std::size_t line_number) {
  validate_alignment(record, line_number);
  validate_mask(record, line_number);
}

CorpusReader::Stream CorpusReader::open(const std::filesystem::path& path) {
  Stream stream{path.string(), std::ifstream(path)};
  if (!stream.in) throw IoError("cannot open " + path.string());
  return stream;
}

CorpusReader::CorpusReader(const CorpusPaths& paths)
    : source_(open(paths.source)), target_(open(paths.target)) {
  if (paths.alignment) alignment_ = open(*paths.alignment);
  if (paths.mask) mask_ = open(*paths.mask);
}

std::optional<SentenceRecord> CorpusReader::next() {
  std::string source_line;
  std::string target_line;
  std::string align_line;
  std::string mask_line;
  const bool has_source = static_cast<bool>(std::getline(source_.in, source_line));
  const bool has_target = static_cast<bool>(std::getline(target_.in, target_line));
  const bool has_align = alignment_ && static_cast<bool>(std::getline(alignment_->in, align_line));
  const bool has_mask = mask_ && static_cast<bool>(std::getline(mask_->in, mask_line));
  const std::size_t line = line_ + 1;

  if (!has_source) {
    auto longer = [&](bool has, const std::string& name) {
      if (has) throw ValidationError(at_line(line, name + " has more lines than " + source_.name));
    };
    longer(has_target, target_.name);
    if (alignment_) longer(has_align, alignment_->name);
    if (mask_) longer(has_mask, mask_->name);
    return std::nullopt;
  }
  auto shorter = [&](bool has, const std::string& name) {
    if (!has) throw ValidationError(at_line(line, name + " has fewer lines than " + source_.name));
  };
  shorter(has_target, target_.name);
  if (alignment_) shorter(has_align, alignment_->name);
  if (mask_) shorter(has_mask, mask_->name);

  line_ = line;
  SentenceRecord record;
  record.source = split_tokens(source_line);
  record.target = split_tokens(target_line);
  // Errors carry the file they concern.
  auto in_file = [](const std::string& name, auto&& step) {
    try {
      step();
    } catch (const ParseError& e) {
      throw ParseError(name + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(name + ": " + e.what());
    }
  };
  if (alignment_) {
    in_file(alignment_->name, [&] {
      record.alignment = parse_pharaoh(align_line, line);
      validate_alignment(record, line);
    });
  }
  if (mask_) {
    in_file(mask_->name, [&] {
      record.mask = parse_mask(mask_line, line);
      validate_mask(record, line);
    });
  }
  return record;
}

std::vector<SentenceRecord> load_corpus(const CorpusPaths& paths) {
  CorpusReader reader(paths);
  std::vector<SentenceRecord> records;
  while (auto record = reader.next()) records.push_back(std::move(*record));
  return records;
}

MaskSchedule MaskSchedule::all_ones(std::size_t epochs) {
  MaskSchedule s;
  s.mode = MaskMode::all_ones;
  s.epochs = epochs;
  return s;
}

MaskSchedule MaskSchedule::random(double probability, std::uint64_t seed, std::size_t epochs) {
  MaskSchedule s;
  s.mode = MaskMode::random;
  s.probability = probability;
  s.seed = seed;
  s.epochs = epochs;
  return s;
}

MaskSchedule MaskSchedule::frequency(std::vector<std::uint64_t> thresholds) {
  MaskSchedule s;
  s.mode = MaskMode::frequency_threshold;
  s.thresholds = std::move(thresholds);
  s.epochs = s.thresholds.size();
  return s;
}

std::size_t MaskSchedule::epoch_count() const {
  return mode == MaskMode::frequency_threshold ? thresholds.size() : epochs;
}

void MaskSchedule::validate() const {
  if (epoch_count() == 0) throw ValidationError("mask schedule has no epochs");
  if (mode == MaskMode::random && !(probability >= 0.0 && probability <= 1.0)) {
    throw ValidationError("mask probability must lie in [0, 1]");
  }
  if (mode == MaskMode::frequency_threshold) {
    for (std::size_t e = 1; e < thresholds.size(); ++e) {
      if (thresholds[e] > thresholds[e - 1]) {
        throw ValidationError("frequency thresholds must be nonincreasing (epoch " +
                              std::to_string(e + 1) + " raises " +
                              std::to_string(thresholds[e - 1]) + " to " +
                              std::to_string(thresholds[e]) + ")");
      }
    }
  }
}

std::vector<std::vector<Mask>> synthesize_masks(std::span<const SentenceRecord> corpus,
                                                const MaskSchedule& schedule) {
  schedule.validate();
  const std::size_t epochs = schedule.epoch_count();
  std::vector<std::vector<Mask>> out(epochs);

  std::map<std::string_view, std::uint64_t> frequency;
  if (schedule.mode == MaskMode::frequency_threshold) {
    for (const SentenceRecord& r : corpus)
      for (const std::string& t : r.target) ++frequency[t];
  }

  for (std::size_t e = 0; e < epochs; ++e) {
    // Per-epoch stream so each epoch is reproducible on its own.
    std::seed_seq seq{static_cast<std::uint32_t>(schedule.seed),
                      static_cast<std::uint32_t>(schedule.seed >> 32),
                      static_cast<std::uint32_t>(e)};
    std::mt19937_64 rng(seq);
    out[e].reserve(corpus.size());
    for (const SentenceRecord& r : corpus) {
      Mask mask(r.target.size(), 1);
      for (std::size_t j = 0; j < r.target.size(); ++j) {
        switch (schedule.mode) {
          case MaskMode::all_ones:
            break;
          case MaskMode::random: {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            mask[j] = u < schedule.probability ? 1 : 0;
            break;
          }
          case MaskMode::frequency_threshold:
            mask[j] = frequency[r.target[j]] >= schedule.thresholds[e] ? 1 : 0;
            break;
        }
      }
      out[e].push_back(std::move(mask));
    }
  }
  return out;
}

void write_lines(const std::filesystem::path& path, std::span<const std::string> lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const std::string& line : lines) out << line << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

void write_mask_file(const std::filesystem::path& path, std::span<const Mask> masks) {
  std::vector<std::string> lines;
  lines.reserve(masks.size());
  for (const Mask& m : masks) lines.push_back(format_mask(m));
  write_lines(path, lines);
}

}  // namespace phraseprobe
