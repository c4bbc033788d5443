#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace eqp::reference {

// Published BS and equilibrium-price tables (S0 = 100, sigma = 0.1, r = 0.05,
// T = 60 days) at target probabilities 20% and 50%. NaN marks an infeasible
// target. Kept verbatim, two decimals, for reproduction reports.

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PublishedTable {
    double target_p;
    std::vector<double> strikes;
    std::vector<double> bs_row;
    std::vector<double> mus;
    std::vector<std::vector<double>> cells;  // [mu][strike]

    [[nodiscard]] bool infeasible(std::size_t mu_idx, std::size_t k_idx) const {
        return std::isnan(cells[mu_idx][k_idx]);
    }
};

inline const PublishedTable& table_p20() {
    static const PublishedTable t{
        0.2,
        {80.00, 82.00, 84.00, 86.00, 88.00, 90.00, 92.00, 94.00, 96.00, 98.00, 100.00, 102.00, 104.00, 106.00, 108.00, 110.00, 112.00},
        {21.85, 19.90, 17.95, 15.99, 14.04, 12.09, 10.15, 8.25, 6.43, 4.74, 3.29, 2.11, 1.25, 0.68, 0.34, 0.15, 0.06},
        {-0.25, -0.23, -0.21, -0.19, -0.17, -0.15, -0.13, -0.11, -0.09, -0.07, -0.05, -0.03, -0.01, 0.01, 0.03, 0.05, 0.07, 0.09, 0.11, 0.13, 0.15, 0.17, 0.19, 0.21, 0.23, 0.25},
        {
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, 2.32, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, 2.32, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, 2.32, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, 2.32, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, 2.32, 0.36, kNaN, kNaN, kNaN, kNaN, kNaN},
            {22.30, 20.34, 18.39, 16.43, 14.45, 12.43, 10.31, 8.18, 6.22, 4.27, 2.32, 0.36, kNaN, kNaN, kNaN, kNaN, kNaN},
            {22.77, 20.81, 18.86, 16.90, 14.93, 12.92, 10.83, 8.58, 6.22, 4.27, 2.32, 0.36, kNaN, kNaN, kNaN, kNaN, kNaN},
            {23.24, 21.29, 19.33, 17.38, 15.41, 13.41, 11.34, 9.13, 6.70, 4.27, 2.32, 0.36, kNaN, kNaN, kNaN, kNaN, kNaN},
            {23.72, 21.76, 19.81, 17.85, 15.89, 13.90, 11.85, 9.68, 7.30, 4.61, 2.32, 0.36, 0.00, kNaN, kNaN, kNaN, kNaN},
            {24.20, 22.24, 20.29, 18.33, 16.37, 14.39, 12.36, 10.22, 7.90, 5.29, 2.32, 0.36, 0.00, kNaN, kNaN, kNaN, kNaN},
            {24.68, 22.72, 20.77, 18.82, 16.86, 14.88, 12.86, 10.75, 8.48, 5.94, 3.01, 0.36, 0.00, kNaN, kNaN, kNaN, kNaN},
            {25.16, 23.21, 21.25, 19.30, 17.34, 15.37, 13.36, 11.28, 9.05, 6.58, 3.76, 0.37, 0.00, kNaN, kNaN, kNaN, kNaN},
            {25.65, 23.69, 21.74, 19.78, 17.83, 15.86, 13.86, 11.80, 9.61, 7.21, 4.48, 1.25, 0.00, 0.00, kNaN, kNaN, kNaN},
            {26.13, 24.18, 22.23, 20.27, 18.32, 16.35, 14.37, 12.32, 10.17, 7.82, 5.18, 2.09, 0.00, 0.00, kNaN, kNaN, kNaN},
            {26.62, 24.67, 22.72, 20.76, 18.81, 16.85, 14.87, 12.84, 10.71, 8.42, 5.86, 2.90, 0.00, 0.00, kNaN, kNaN, kNaN},
            {27.12, 25.16, 23.21, 21.25, 19.30, 17.34, 15.37, 13.35, 11.25, 9.01, 6.52, 3.67, 0.24, 0.00, kNaN, kNaN, kNaN},
            {27.61, 25.66, 23.70, 21.75, 19.80, 17.84, 15.87, 13.87, 11.79, 9.58, 7.16, 4.41, 1.15, 0.00, 0.00, kNaN, kNaN},
            {28.11, 26.15, 24.20, 22.25, 20.29, 18.34, 16.37, 14.38, 12.32, 10.15, 7.79, 5.13, 2.01, 0.00, 0.00, kNaN, kNaN},
            {28.61, 26.65, 24.70, 22.75, 20.79, 18.84, 16.87, 14.89, 12.85, 10.71, 8.40, 5.82, 2.84, 0.00, 0.00, kNaN, kNaN},
            {29.11, 27.15, 25.20, 23.25, 21.29, 19.34, 17.38, 15.40, 13.38, 11.27, 9.01, 6.50, 3.63, 0.18, 0.00, kNaN, kNaN},
            {29.61, 27.66, 25.71, 23.75, 21.80, 19.84, 17.88, 15.91, 13.90, 11.82, 9.60, 7.16, 4.39, 1.11, 0.00, 0.00, kNaN},
        }};
    return t;
}

inline const PublishedTable& table_p50() {
    static const PublishedTable t{
        0.5,
        {80.00, 82.00, 84.00, 86.00, 88.00, 90.00, 92.00, 94.00, 96.00, 98.00, 100.00, 102.00, 104.00, 106.00, 108.00, 110.00},
        {21.85, 19.90, 17.95, 15.99, 14.04, 12.09, 10.15, 8.25, 6.43, 4.74, 3.29, 2.11, 1.25, 0.68, 0.34, 0.15},
        {-0.25, -0.23, -0.21, -0.19, -0.17, -0.15, -0.13, -0.11, -0.09, -0.07, -0.05, -0.03, -0.01, 0.01, 0.03, 0.05, 0.07, 0.09, 0.11, 0.13, 0.15, 0.17, 0.19, 0.21, 0.23, 0.25},
        {
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, 2.32, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, 2.32, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, 2.32, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, 2.32, kNaN, kNaN, kNaN, kNaN, kNaN},
            {21.85, 19.90, 17.95, 15.99, 14.04, 12.08, 10.13, 8.18, 6.22, 4.27, 2.32, 0.36, kNaN, kNaN, kNaN, kNaN},
            {21.97, 20.02, 18.06, 16.11, 14.15, 12.18, 10.17, 8.18, 6.22, 4.27, 2.32, 0.36, kNaN, kNaN, kNaN, kNaN},
            {22.44, 20.49, 18.53, 16.58, 14.62, 12.66, 10.66, 8.58, 6.33, 4.27, 2.32, 0.36, kNaN, kNaN, kNaN, kNaN},
            {22.91, 20.96, 19.01, 17.05, 15.10, 13.13, 11.14, 9.09, 6.89, 4.40, 2.32, 0.36, kNaN, kNaN, kNaN, kNaN},
            {23.39, 21.43, 19.48, 17.53, 15.57, 13.61, 11.63, 9.59, 7.43, 5.03, 2.32, 0.36, kNaN, kNaN, kNaN, kNaN},
            {23.87, 21.91, 19.96, 18.00, 16.05, 14.09, 12.12, 10.10, 7.97, 5.64, 2.91, 0.36, 0.00, kNaN, kNaN, kNaN},
            {24.34, 22.39, 20.44, 18.48, 16.53, 14.57, 12.60, 10.60, 8.50, 6.23, 3.61, 0.36, 0.00, kNaN, kNaN, kNaN},
            {24.83, 22.87, 20.92, 18.97, 17.01, 15.05, 13.09, 11.09, 9.03, 6.80, 4.29, 1.23, 0.00, kNaN, kNaN, kNaN},
            {25.31, 23.36, 21.40, 19.45, 17.50, 15.54, 13.58, 11.59, 9.54, 7.37, 4.93, 2.04, 0.00, kNaN, kNaN, kNaN},
        }};
    return t;
}

}  // namespace eqp::reference
