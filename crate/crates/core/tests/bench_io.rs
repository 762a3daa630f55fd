// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Datasets on disk and benchmark reports.

use std::fs;

use ged_core::bench::*;
use ged_core::cost::ConstantCostModel;

fn pairs_in(dir: &std::path::Path, n: usize, count: usize, seed: u64) -> Vec<BenchPair> {
    let spec = SynthSpec {
        n,
        seed,
        ..Default::default()
    };
    write_dataset(dir, &gen_synth_pairs(&spec, count).unwrap()).unwrap();
    let (pairs, errors) = read_dataset(dir).unwrap();
    assert!(errors.is_empty());
    pairs
}

fn without_time(csv: &str) -> String {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f[4] = "";
            f.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn dataset_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SynthSpec {
        n: 6,
        seed: 3,
        ..Default::default()
    };
    let generated = gen_synth_pairs(&spec, 3).unwrap();
    let ids = write_dataset(dir.path(), &generated).unwrap();
    assert_eq!(ids, vec!["0000", "0001", "0002"]);
    assert!(dir.path().join("0001.target.gedg").exists());
    let (pairs, errors) = read_dataset(dir.path()).unwrap();
    assert!(errors.is_empty());
    for (p, (s, t)) in pairs.iter().zip(&generated) {
        assert_eq!((&p.source, &p.target), (s, t));
    }
}

#[test]
fn generation_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let spec = SynthSpec {
        n: 7,
        seed: 99,
        ..Default::default()
    };
    write_dataset(a.path(), &gen_synth_pairs(&spec, 4).unwrap()).unwrap();
    write_dataset(b.path(), &gen_synth_pairs(&spec, 4).unwrap()).unwrap();
    for entry in fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap()
        );
    }
}

#[test]
fn malformed_files_are_reported_and_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let mut pairs = pairs_in(dir.path(), 5, 2, 1);
    fs::write(
        dir.path().join("0001.target.gedg"),
        "graph undirected\nv 0 A\ne 0 0 x\n",
    )
    .unwrap();
    fs::write(dir.path().join("0002.source.gedg"), "graph undirected\nv 0 A\n").unwrap();
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let (loaded, errors) = read_dataset(dir.path()).unwrap();
    pairs.truncate(1);
    assert_eq!(loaded.len(), 1);
    assert_eq!(loaded[0].id, pairs[0].id);
    assert_eq!(errors.len(), 2);
    assert!(errors.iter().any(|e| matches!(e, BenchError::Parse { .. })));
    assert!(errors
        .iter()
        .any(|e| matches!(e, BenchError::Unpaired { missing: "target", .. })));
}

#[test]
fn empty_dataset_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let (pairs, errors) = read_dataset(dir.path()).unwrap();
    assert!(pairs.is_empty() && errors.is_empty());
    let records = run_benchmark(
        &pairs,
        &Method::ALL,
        &ConstantCostModel::unit(),
        &BenchConfig::default(),
    );
    assert_eq!(records_to_csv(&records).unwrap(), "pair,method,d,e,t,iters,exact_hit\n");
}

#[test]
fn missing_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        read_dataset(&dir.path().join("absent")),
        Err(BenchError::Io { .. })
    ));
}

#[test]
fn qap_improves_on_bipartite_on_average() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = pairs_in(dir.path(), 6, 50, 500);
    let methods = [Method::BipartiteEdges, Method::Qap];
    let records = run_benchmark(&pairs, &methods, &ConstantCostModel::unit(), &BenchConfig::default());
    let summary = summarize(&records);
    assert_eq!(summary.len(), 2);
    assert!(summary[1].avg_d <= summary[0].avg_d);
    for r in &records {
        assert!(r.e.is_none() && r.exact_hit.is_none());
    }
}

#[test]
fn reports_are_reproducible_and_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = pairs_in(dir.path(), 6, 8, 21);
    let model = ConstantCostModel::unit();
    let cfg = BenchConfig::default();
    let first = run_benchmark(&pairs, &Method::ALL, &model, &cfg);
    let second = run_benchmark(&pairs, &Method::ALL, &model, &cfg);
    let (c1, c2) = (records_to_csv(&first).unwrap(), records_to_csv(&second).unwrap());
    assert_eq!(without_time(&c1), without_time(&c2));

    // summary averages recompute from the CSV rows
    let mut reader = csv::Reader::from_reader(c1.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 32);
    for s in summarize(&first) {
        let mine: Vec<&csv::StringRecord> = rows.iter().filter(|r| &r[1] == s.method.name()).collect();
        let d: f64 = mine.iter().map(|r| r[2].parse::<f64>().unwrap()).sum::<f64>() / mine.len() as f64;
        assert_eq!(d, s.avg_d);
        let hits = mine.iter().filter(|r| &r[6] == "1").count() as f64 / mine.len() as f64;
        assert_eq!(Some(hits), s.hit_rate);
        for r in &mine {
            assert!(r[3].parse::<f64>().unwrap() >= -1e-9);
        }
    }
}
