#include "lpdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lpdp {

CachedOracle::CachedOracle(std::shared_ptr<const RewardOracle> inner)
    : inner_(std::move(inner)) {
    if (!inner_) throw std::invalid_argument("CachedOracle: null inner oracle");
}

double CachedOracle::reward(const Sequence& x) const {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = cache_.find(x.str());
    if (it != cache_.end()) {
        ++stats_.hits;
        return it->second;
    }
    const double r = inner_->reward(x);
    cache_.emplace(x.str(), r);
    ++stats_.misses;
    return r;
}

CacheStats CachedOracle::stats() const {
    std::lock_guard<std::mutex> lock(mu_);
    return stats_;
}

void CachedOracle::reset() {
    std::lock_guard<std::mutex> lock(mu_);
    cache_.clear();
    stats_ = CacheStats{};
}

double delta_reward(const CachedOracle& oracle, const Sequence& x, const EditAction& a) {
    return oracle.reward(apply_edit(x, a)) - oracle.reward(x);
}

SubstringCountOracle::SubstringCountOracle(std::string pattern) : pattern_(std::move(pattern)) {
    if (pattern_.empty()) {
        throw std::invalid_argument("substring oracle: empty pattern");
    }
    for (char c : pattern_) nucleotide_from_char(c);
}

double SubstringCountOracle::reward(const Sequence& x) const {
    const std::string& s = x.str();
    if (s.size() < pattern_.size()) return 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + pattern_.size() <= s.size(); ++i) {
        if (s.compare(i, pattern_.size(), pattern_) == 0) ++count;
    }
    return static_cast<double>(count);
}

Pwm::Pwm(std::vector<std::array<double, 4>> rows) {
    if (rows.empty()) throw std::invalid_argument("pwm: no rows");
    log_rows_.reserve(rows.size());
    for (auto& row : rows) {
        double sum = 0.0;
        for (double p : row) {
            if (p < 0.0 || !std::isfinite(p)) {
                throw std::invalid_argument("pwm: entries must be finite and nonnegative");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("pwm: each row must sum to 1");
        }
        // floor and renormalize so every entry is strictly positive
        double floored_sum = 0.0;
        for (double& p : row) {
            p = std::max(p, kProbFloor);
            floored_sum += p;
        }
        std::array<double, 4> log_row{};
        double row_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < 4; ++j) {
            log_row[j] = std::log(row[j] / floored_sum);
            row_max = std::max(row_max, log_row[j]);
        }
        consensus_log_prob_ += row_max;
        log_rows_.push_back(log_row);
    }
}

Pwm Pwm::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("pwm: cannot open file " + path);
    std::vector<std::array<double, 4>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::array<double, 4> row{};
        for (double& v : row) {
            if (!(ss >> v)) {
                throw std::runtime_error("pwm: expected four probabilities per row in " + path);
            }
        }
        double extra;
        if (ss >> extra) {
            throw std::runtime_error("pwm: more than four columns in " + path);
        }
        rows.push_back(row);
    }
    return Pwm(std::move(rows));
}

double Pwm::log_prob(std::size_t row, Nucleotide n) const {
    return log_rows_.at(row)[static_cast<std::size_t>(n)];
}

double Pwm::window_log_prob(const Sequence& x, std::size_t start) const {
    if (start + width() > x.length()) {
        throw std::out_of_range("pwm window out of range");
    }
    double lp = 0.0;
    for (std::size_t i = 0; i < width(); ++i) {
        lp += log_prob(i, x.at(start + i));
    }
    return lp;
}

PwmOracle::PwmOracle(Pwm pwm, Mode mode) : pwm_(std::move(pwm)), mode_(mode) {}

double PwmOracle::reward(const Sequence& x) const {
    if (x.length() < pwm_.width()) return 0.0;
    const std::size_t n_windows = x.length() - pwm_.width() + 1;
    if (mode_ == Mode::BestWindow) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < n_windows; ++s) {
            best = std::max(best, pwm_.window_log_prob(x, s));
        }
        return std::exp(best - pwm_.consensus_log_prob());
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < n_windows; ++s) {
        sum += std::exp(pwm_.window_log_prob(x, s) - pwm_.consensus_log_prob());
    }
    return sum;
}

SpliceToyOracle::SpliceToyOracle(Pwm donor, Pwm acceptor, std::size_t donor_index,
                                 std::size_t acceptor_offset)
    : donor_(std::move(donor)),
      acceptor_(std::move(acceptor)),
      donor_index_(donor_index),
      acceptor_offset_(acceptor_offset) {}

void SpliceToyOracle::check_windows(const Sequence& x) const {
    const std::size_t len = x.length();
    if (donor_index_ + donor_.width() > len) {
        throw std::runtime_error("splice oracle: donor window [" + std::to_string(donor_index_) +
                                 ", +" + std::to_string(donor_.width()) +
                                 ") does not fit sequence of length " + std::to_string(len));
    }
    if (acceptor_offset_ + acceptor_.width() > len) {
        throw std::runtime_error("splice oracle: acceptor window (" +
                                 std::to_string(acceptor_.width()) + " bases ending " +
                                 std::to_string(acceptor_offset_) +
                                 " before the end) does not fit sequence of length " +
                                 std::to_string(len));
    }
}

double SpliceToyOracle::donor_prob(const Sequence& x) const {
    check_windows(x);
    return std::exp(donor_.window_log_prob(x, donor_index_));
}

double SpliceToyOracle::acceptor_prob(const Sequence& x) const {
    check_windows(x);
    const std::size_t start = x.length() - acceptor_offset_ - acceptor_.width();
    return std::exp(acceptor_.window_log_prob(x, start));
}

bool SpliceToyOracle::donor_has_gt(const Sequence& x) const {
    if (donor_index_ + 2 > x.length()) return false;
    return x.at(donor_index_) == Nucleotide::G && x.at(donor_index_ + 1) == Nucleotide::T;
}

double SpliceToyOracle::reward(const Sequence& x) const {
    return std::sqrt(donor_prob(x) * acceptor_prob(x));
}

}  // namespace lpdp
