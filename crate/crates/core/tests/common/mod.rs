#![allow(dead_code)]

use std::path::PathBuf;

use driftbar::stream_io::{parse_arff, ArffOptions};
use driftbar::StreamDataset;

pub fn electricity_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/electricity.arff")
}

pub fn electricity() -> StreamDataset {
    let file = std::fs::File::open(electricity_path()).expect("data/electricity.arff");
    parse_arff(std::io::BufReader::new(file), &ArffOptions::default()).expect("parse electricity")
}
