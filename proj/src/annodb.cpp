#include "sbmltk/annodb.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include "sbmltk/text.hpp"

namespace sbmltk {

namespace fs = std::filesystem;

std::string EntityRecord::to_tsv() const {
  auto join = [](const auto& items, auto&& render) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += '|';
      out += render(item);
    }
    return out;
  };
  auto same = [](const std::string& s) { return s; };
  return primary_uri + '\t' + join(names, same) + '\t' + join(crossrefs, same) + '\t' +
         join(relations, [](const auto& rel) { return rel.first + "=" + rel.second; });
}

EntityRecord parse_entity_record(std::string_view line) {
  auto fields = split(line, '\t');
  if (fields.size() < 3 || fields.size() > 4) {
    throw Error(ErrorCode::MalformedRecord, "expected 3 or 4 tab-separated fields, got " +
                                                std::to_string(fields.size()));
  }
  EntityRecord r;
  try {
    r.primary_uri = normalize_uri(trim(fields[0]));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("primary URI: ") + e.what());
  }
  for (auto name : split(fields[1], '|')) {
    name = trim(name);
    if (name.empty()) continue;
    if (std::find(r.names.begin(), r.names.end(), name) == r.names.end()) r.names.emplace_back(name);
  }
  if (r.names.empty()) throw Error(ErrorCode::MalformedRecord, "record has no names");
  for (auto ref : split(fields[2], '|')) {
    ref = trim(ref);
    if (ref.empty()) continue;
    try {
      auto uri = normalize_uri(ref);
      if (uri != r.primary_uri) r.crossrefs.insert(uri);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedRecord, std::string("cross-reference: ") + e.what());
    }
  }
  if (fields.size() == 4) {
    for (auto rel : split(fields[3], '|')) {
      rel = trim(rel);
      if (rel.empty()) continue;
      auto eq = rel.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw Error(ErrorCode::MalformedRecord, "relation must be rel=uri: " + std::string(rel));
      }
      try {
        r.relations.emplace(std::string(trim(rel.substr(0, eq))), normalize_uri(trim(rel.substr(eq + 1))));
      } catch (const Error& e) {
        throw Error(ErrorCode::MalformedRecord, std::string("relation target: ") + e.what());
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

class UnionFind {
 public:
  std::size_t add(const std::string& key) {
    auto [it, fresh] = index_.emplace(key, parent_.size());
    if (fresh) {
      parent_.push_back(parent_.size());
      size_.push_back(1);
    }
    return it->second;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(const std::string& a, const std::string& b) {
    auto ra = find(add(a));
    auto rb = find(add(b));
    if (ra == rb) return;
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
  }
  const std::map<std::string, std::size_t>& index() const { return index_; }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

bool absorb(EntityRecord& into, const EntityRecord& from) {
  bool changed = false;
  for (const auto& name : from.names) {
    if (std::find(into.names.begin(), into.names.end(), name) == into.names.end()) {
      into.names.push_back(name);
      changed = true;
    }
  }
  for (const auto& ref : from.crossrefs) changed |= into.crossrefs.insert(ref).second;
  for (const auto& rel : from.relations) changed |= into.relations.insert(rel).second;
  return changed;
}

void write_atomically(const fs::path& target, const std::string& content) {
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) {
    auto path = (dir / "LOCK").string();
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw Error(ErrorCode::Io, "cannot open " + path);
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::Io, "cannot lock " + path);
    }
  }
  ~DirectoryLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace

struct AnnotationStore::State {
  std::map<std::string, EntityRecord> records;
  std::map<std::string, std::string> class_of;               // uri -> class key
  std::map<std::string, std::set<std::string>> members;      // class key -> uris
  std::map<std::string, std::string> representative;         // class key -> primary uri

  void rebuild() {
    UnionFind uf;
    for (const auto& [primary, record] : records) {
      uf.add(primary);
      for (const auto& ref : record.crossrefs) uf.unite(primary, ref);
    }
    std::map<std::size_t, std::set<std::string>> groups;
    for (const auto& [uri, idx] : uf.index()) groups[uf.find(idx)].insert(uri);
    class_of.clear();
    members.clear();
    representative.clear();
    for (auto& [root, uris] : groups) {
      const auto& key = *uris.begin();
      for (const auto& uri : uris) {
        class_of[uri] = key;
        if (!representative.count(key) && records.count(uri)) representative[key] = uri;
      }
      members[key] = std::move(uris);
    }
  }
};

AnnotationStore::AnnotationStore() : state_(std::make_unique<State>()) {}

AnnotationStore::AnnotationStore(const fs::path& dir) : dir_(dir), state_(std::make_unique<State>()) {
  fs::create_directories(dir);
  load_log();
}

AnnotationStore::~AnnotationStore() = default;

void AnnotationStore::load_log() {
  state_->records.clear();
  std::ifstream in(*dir_ / "records.log", std::ios::binary);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      auto record = parse_entity_record(line);
      state_->records[record.primary_uri] = std::move(record);
    } catch (const Error& e) {
      throw Error(ErrorCode::Io, "corrupt records.log line " + std::to_string(number) + ": " + e.what());
    }
  }
  state_->rebuild();
}

void AnnotationStore::persist(const std::vector<EntityRecord>& changed) {
  if (!changed.empty()) {
    std::ofstream log(*dir_ / "records.log", std::ios::binary | std::ios::app);
    for (const auto& r : changed) log << r.to_tsv() << '\n';
    if (!log.flush()) throw Error(ErrorCode::Io, "cannot append to records.log");
  }
  std::string index;
  for (const auto& [uri, key] : state_->class_of) {
    index += uri + '\t' + state_->representative.at(key) + '\n';
  }
  std::set<std::pair<std::string, std::string>> names;
  for (const auto& [primary, record] : state_->records) {
    for (const auto& name : record.names) names.emplace(to_lower(name), primary);
  }
  std::string name_index;
  for (const auto& [name, primary] : names) name_index += name + '\t' + primary + '\n';
  write_atomically(*dir_ / "index.tsv", index);
  write_atomically(*dir_ / "names.tsv", name_index);
}

IngestSummary AnnotationStore::ingest(std::string_view tsv) {
  IngestSummary summary;
  std::vector<EntityRecord> incoming;
  auto lines = split_lines(tsv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto content = trim(lines[i]);
    if (content.empty() || content.front() == '#') continue;
    try {
      incoming.push_back(parse_entity_record(lines[i]));
    } catch (const Error& e) {
      summary.rejected.push_back({i + 1, e.what()});
    }
  }
  summary.records = incoming.size();

  std::unique_lock guard(mutex_);
  std::optional<DirectoryLock> lock;
  if (dir_) {
    lock.emplace(*dir_);
    load_log();  // another process may have written since we opened
  }
  std::map<std::string, EntityRecord> touched;
  for (const auto& record : incoming) {
    auto it = state_->records.find(record.primary_uri);
    bool changed = false;
    if (it == state_->records.end()) {
      it = state_->records.emplace(record.primary_uri, record).first;
      changed = true;
    } else {
      changed = absorb(it->second, record);
    }
    if (changed) touched[record.primary_uri] = it->second;
  }
  summary.changed = touched.size();
  state_->rebuild();
  if (dir_) {
    std::vector<EntityRecord> changed;
    for (auto& [uri, record] : touched) changed.push_back(std::move(record));
    persist(changed);
  }
  return summary;
}

std::vector<EntityRecord> AnnotationStore::search_by_name(std::string_view query, bool exact) const {
  std::shared_lock guard(mutex_);
  auto needle = to_lower(query);
  std::vector<EntityRecord> hits;
  for (const auto& [primary, record] : state_->records) {
    bool hit = false;
    for (const auto& name : record.names) {
      auto lower = to_lower(name);
      if (exact ? lower == needle : lower.find(needle) != std::string::npos) {
        hit = true;
        break;
      }
    }
    if (hit) hits.push_back(record);
  }
  std::sort(hits.begin(), hits.end(), [](const EntityRecord& a, const EntityRecord& b) {
    auto la = to_lower(a.names.front());
    auto lb = to_lower(b.names.front());
    if (la != lb) return la < lb;
    if (a.names.front() != b.names.front()) return a.names.front() < b.names.front();
    return a.primary_uri < b.primary_uri;
  });
  return hits;
}

std::optional<EntityRecord> AnnotationStore::search_by_id(std::string_view ns, std::string_view id) const {
  std::string uri;
  try {
    uri = normalize_uri("identifiers.org/" + std::string(ns) + "/" + std::string(id));
  } catch (const Error&) {
    return std::nullopt;
  }
  std::shared_lock guard(mutex_);
  auto it = state_->class_of.find(uri);
  if (it == state_->class_of.end()) return std::nullopt;
  auto rep = state_->representative.find(it->second);
  if (rep == state_->representative.end()) return std::nullopt;
  return state_->records.at(rep->second);
}

std::set<std::string> AnnotationStore::equivalence_set(std::string_view uri) const {
  auto normal = normalize_uri(uri);
  std::shared_lock guard(mutex_);
  auto it = state_->class_of.find(normal);
  if (it == state_->class_of.end()) return {normal};
  return state_->members.at(it->second);
}

std::set<std::string> AnnotationStore::equivalents(std::string_view uri) const {
  try {
    return equivalence_set(uri);
  } catch (const Error&) {
    return {std::string(uri)};
  }
}

std::size_t AnnotationStore::record_count() const {
  std::shared_lock guard(mutex_);
  return state_->records.size();
}

std::vector<EntityRecord> AnnotationStore::records() const {
  std::shared_lock guard(mutex_);
  std::vector<EntityRecord> out;
  for (const auto& [uri, record] : state_->records) out.push_back(record);
  return out;
}

}  // namespace sbmltk
