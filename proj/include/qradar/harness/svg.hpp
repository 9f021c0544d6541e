// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace qradar::harness::svg {

struct Series {
    std::string name;
    std::vector<double> values; // one per category / x value
};

/// Grouped bar chart; the y axis runs from 0 to y_max (auto when <= 0).
std::string bar_chart(const std::string &title, const std::vector<std::string> &categories,
                      const std::vector<Series> &series, const std::string &y_label, double y_max = 0.0);

/// Line chart with markers over shared x values.
std::string line_chart(const std::string &title, const std::vector<double> &x, const std::vector<Series> &series,
                       const std::string &x_label, const std::string &y_label);

} // namespace qradar::harness::svg
