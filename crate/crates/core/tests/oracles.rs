//! Counting functions and kernel sums against naive full sums.

mod common;

#[test]
fn counting_functions_match_trial_division() {
    common::counting_functions_match_trial_division().unwrap();
}

#[test]
fn abel_sums_match_naive() {
    common::abel_sums_match_naive().unwrap();
}

#[test]
fn gaussian_window_sums_match_naive() {
    common::gaussian_window_sums_match_naive().unwrap();
}

#[test]
fn bentz_sums_match_naive_at_the_cap() {
    common::bentz_sums_match_naive_at_the_cap().unwrap();
}

#[test]
fn chebyshev_series_matches_naive() {
    common::chebyshev_series_matches_naive().unwrap();
}
