//! Benchmark fixtures shared by the criterion benches.

use laserphm::models::FaultDetectorModel;
use laserphm::preprocess::build_feature_window;
use laserphm::sim::{generate_sequence, sample_scenario};
use laserphm::{DegradationMode, FeatureWindow, RunToFailureSequence, SgFilterSpec};

pub fn sequence(mode: DegradationMode, seed: u64) -> RunToFailureSequence {
    generate_sequence(&sample_scenario(mode, seed).expect("scenario")).expect("sequence")
}

pub fn window(mode: DegradationMode, seed: u64) -> FeatureWindow {
    build_feature_window(&sequence(mode, seed), SgFilterSpec::default(), 0.6).expect("window")
}

pub fn detector() -> FaultDetectorModel {
    FaultDetectorModel::new(1).expect("detector")
}
