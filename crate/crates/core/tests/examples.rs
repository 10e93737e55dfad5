//! Runs every example's `run()` so the examples stay compiling and working.

#[allow(dead_code)]
#[path = "../examples/channel_likelihood.rs"]
mod channel_likelihood;

#[allow(dead_code)]
#[path = "../examples/information_rate.rs"]
mod information_rate;

#[allow(dead_code)]
#[path = "../examples/inner_code_search.rs"]
mod inner_code_search;

#[allow(dead_code)]
#[path = "../examples/reed_solomon.rs"]
mod reed_solomon;

#[allow(dead_code)]
#[path = "../examples/concatenated_roundtrip.rs"]
mod concatenated_roundtrip;

#[allow(dead_code)]
#[path = "../examples/monte_carlo.rs"]
mod monte_carlo;

#[allow(dead_code)]
#[path = "../examples/dobrushin_segmentation.rs"]
mod dobrushin_segmentation;


#[test]
fn channel_likelihood_runs() {
    channel_likelihood::run().unwrap();
}

#[test]
fn information_rate_runs() {
    information_rate::run().unwrap();
}

#[test]
fn inner_code_search_runs() {
    inner_code_search::run().unwrap();
}

#[test]
fn reed_solomon_runs() {
    reed_solomon::run().unwrap();
}

#[test]
fn concatenated_roundtrip_runs() {
    concatenated_roundtrip::run().unwrap();
}

#[test]
fn monte_carlo_runs() {
    monte_carlo::run().unwrap();
}

#[test]
fn dobrushin_segmentation_runs() {
    dobrushin_segmentation::run().unwrap();
}
