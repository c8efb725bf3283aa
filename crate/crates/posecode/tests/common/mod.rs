#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use posecode::formats::write_poses_jsonl;
use posecode_core::{synthetic, PoseRecord};

pub fn posecode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posecode"))
        .args(args)
        .env_remove("POSECODE_DATA_DIR")
        .output()
        .expect("binary runs")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn write_corpus(dir: &Path, name: &str, records: &[PoseRecord]) -> PathBuf {
    let p = dir.join(name);
    let mut f = std::fs::File::create(&p).unwrap();
    write_poses_jsonl(records, &mut f).unwrap();
    p
}

pub fn synthetic_corpus(dir: &Path, n: usize, seed: u64) -> PathBuf {
    write_corpus(dir, "poses.jsonl", &synthetic::varied_corpus(n, seed))
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
