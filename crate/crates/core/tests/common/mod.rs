#![allow(dead_code)]

use std::path::PathBuf;

use prbatl::lbatm::{parse_machine, Machine, Tape};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

/// The hand-written machines, sorted by file name.
pub fn corpus() -> Vec<(String, Machine)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(data_dir().join("machines"))
        .expect("machine corpus")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "atm"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&p).unwrap();
            let m = parse_machine(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, m)
        })
        .collect()
}

/// Every tape of 2 to 4 cells, delimiters included.
pub fn corpus_tapes() -> Vec<Tape> {
    (2..=4).flat_map(Tape::all_of_length).collect()
}
