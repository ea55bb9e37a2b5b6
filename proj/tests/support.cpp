#include "support.hpp"

#include <atomic>
#include <sstream>
#include <unistd.h>

namespace testing {

TempDir::TempDir(std::string_view tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("xlc-" + std::string(tag) + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& file, std::string_view content) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << content;
}

std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path fixture_dir() { return XLC_FIXTURE_DIR; }

xlc::Service service(std::string id, std::string name, std::string description) {
    xlc::Service s;
    s.id = std::move(id);
    s.name = std::move(name);
    s.description = std::move(description);
    return s;
}

xlc::Incident incident(std::string id, std::string service_id, std::string title, std::string summary,
                       std::optional<std::string> root_cause, std::optional<bool> df) {
    xlc::Incident i;
    i.id = std::move(id);
    i.owning_service_id = std::move(service_id);
    i.title = std::move(title);
    i.raw_summary = std::move(summary);
    i.ground_truth_root_cause = std::move(root_cause);
    i.is_dependency_failure = df;
    return i;
}

}  // namespace testing
