// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace radval {

namespace {

void check_contiguous(const StepLog& log) {
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const int expected = static_cast<int>(i);
        if (log.records[i].step != expected)
            throw std::invalid_argument("step log gap: expected step " + std::to_string(expected) + ", found " +
                                        std::to_string(log.records[i].step));
    }
    if (log.records.empty()) throw std::invalid_argument("step log has no records");
}

}  // namespace

ScoreLedger deltas_from_log(const StepLog& log, ValuationMode mode) {
    check_contiguous(log);
    ScoreLedger ledger;
    if (mode == ValuationMode::kStepDelta) {
        double prev_psnr = log.baseline_psnr;
        double prev_l1 = log.baseline_l1;
        for (const StepRecord& r : log.records) {
            ledger.entries[r.image_id].push_back({r.epoch, r.step, r.val_psnr - prev_psnr, r.val_l1 - prev_l1});
            prev_psnr = r.val_psnr;
            prev_l1 = r.val_l1;
        }
    } else if (mode == ValuationMode::kRevisitDelta) {
        std::map<int, std::pair<double, double>> last_seen;  // image_id -> (psnr, l1)
        for (const StepRecord& r : log.records) {
            const auto it = last_seen.find(r.image_id);
            if (it == last_seen.end()) {
                ledger.entries[r.image_id].push_back({r.epoch, r.step, 0.0, 0.0});
            } else {
                ledger.entries[r.image_id].push_back(
                    {r.epoch, r.step, r.val_psnr - it->second.first, r.val_l1 - it->second.second});
            }
            last_seen[r.image_id] = {r.val_psnr, r.val_l1};
        }
    } else {
        throw std::invalid_argument("fixed_state ledgers come from fixed_state_deltas");
    }
    return ledger;
}

ScoreLedger fixed_state_deltas(const StepLog& log, int designated_epoch) {
    check_contiguous(log);
    double base_psnr = log.baseline_psnr;
    double base_l1 = log.baseline_l1;
    bool found = false;
    ScoreLedger ledger;
    for (const StepRecord& r : log.records) {
        if (r.epoch < designated_epoch) {
            base_psnr = r.val_psnr;
            base_l1 = r.val_l1;
        } else if (r.epoch == designated_epoch) {
            found = true;
            ledger.entries[r.image_id].push_back({r.epoch, r.step, r.val_psnr - base_psnr, r.val_l1 - base_l1});
        }
    }
    if (!found) throw std::invalid_argument("step log has no records in epoch " + std::to_string(designated_epoch));
    return ledger;
}

std::vector<ContributionScore> dv_scores(const ScoreLedger& ledger) {
    if (ledger.entries.empty()) throw std::invalid_argument("empty score ledger");
    int max_epoch = 0;
    for (const auto& [id, entries] : ledger.entries)
        for (const LedgerEntry& e : entries) max_epoch = std::max(max_epoch, e.epoch);
    if (max_epoch < 2) throw std::invalid_argument("valuation requires >= 2 epochs");

    std::vector<ContributionScore> scores;
    scores.reserve(ledger.entries.size());
    for (const auto& [id, entries] : ledger.entries) {
        ContributionScore s;
        s.image_id = id;
        s.n_appearances = static_cast<int>(entries.size());
        s.epoch1_only = true;
        for (const LedgerEntry& e : entries) {
            if (e.epoch >= 2) {
                s.dv_psnr += e.delta_psnr;
                s.dv_loss -= e.delta_l1;
                s.epoch1_only = false;
            }
            if (e.epoch == max_epoch) s.dv_last_epoch += e.delta_psnr;
        }
        scores.push_back(s);
    }
    return scores;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson inputs must have equal length");
    if (x.size() < 2) throw std::invalid_argument("pearson needs at least 2 pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson is undefined for zero-variance input");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<int> select_positive(std::span<const ContributionScore> scores, double threshold) {
    std::vector<const ContributionScore*> kept;
    for (const ContributionScore& s : scores)
        if (s.dv_psnr > threshold) kept.push_back(&s);
    std::sort(kept.begin(), kept.end(), [](const ContributionScore* a, const ContributionScore* b) {
        if (a->dv_psnr != b->dv_psnr) return a->dv_psnr > b->dv_psnr;
        return a->image_id < b->image_id;
    });
    std::vector<int> ids;
    ids.reserve(kept.size());
    for (const ContributionScore* s : kept) ids.push_back(s->image_id);
    return ids;
}

void save_scores(const std::string& path, std::span<const ContributionScore> scores) {
    std::string text = "image_id,dv_psnr,dv_loss,dv_last_epoch,n_appearances\n";
    for (const ContributionScore& s : scores) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%d\n", s.image_id, s.dv_psnr, s.dv_loss, s.dv_last_epoch,
                      s.n_appearances);
        text += buf;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

void save_ledger(const std::string& path, const ScoreLedger& ledger) {
    std::string text = "image_id,epoch,step,delta_psnr,delta_l1\n";
    for (const auto& [id, entries] : ledger.entries) {
        for (const LedgerEntry& e : entries) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%d,%d,%d,%.9g,%.9g\n", id, e.epoch, e.step, e.delta_psnr, e.delta_l1);
            text += buf;
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

std::vector<ContributionScore> load_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scores file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "image_id,dv_psnr,dv_loss,dv_last_epoch,n_appearances")
        throw std::runtime_error("bad scores header in " + path);
    std::vector<ContributionScore> scores;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        double v[5];
        for (int k = 0; k < 5; ++k) {
            if (!std::getline(ss, field, ','))
                throw std::runtime_error(path + ": short row at line " + std::to_string(line_no));
            try {
                v[k] = std::stod(field);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": bad number at line " + std::to_string(line_no));
            }
        }
        ContributionScore s;
        s.image_id = static_cast<int>(v[0]);
        s.dv_psnr = v[1];
        s.dv_loss = v[2];
        s.dv_last_epoch = v[3];
        s.n_appearances = static_cast<int>(v[4]);
        scores.push_back(s);
    }
    return scores;
}

}  // namespace radval
