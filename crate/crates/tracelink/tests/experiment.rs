mod common;

use std::fs;
use std::path::Path;

use common::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use tracelink::experiment::{ablation, grid_on, grid_search, prepare, run_pipeline, Backend, DatasetPaths, RunSpec};
use tracelink::io::read_vectors;
use tracelink_core::embedding::write_vectors;
use tracelink_core::{EmbeddingMatrix, RewardConfig};

fn spec_for(ds: &Dataset, backend: Backend) -> RunSpec {
    RunSpec::new(
        "test",
        DatasetPaths {
            sources: ds.sources.clone(),
            targets: ds.targets.clone(),
            answers: ds.answers.clone(),
        },
        backend,
    )
}

/// Random vector dataset with `n` sources and `m` targets, each source
/// linked to two or three targets.
fn random_vector_dataset(root: &Path, n: usize, m: usize, seed: u64) -> RunSpec {
    let mut rng = StdRng::seed_from_u64(seed);
    let sids: Vec<String> = (0..n).map(|i| format!("S{i:02}")).collect();
    let tids: Vec<String> = (0..m).map(|i| format!("T{i:02}")).collect();
    let src: Vec<(&str, &str)> = sids.iter().map(|s| (s.as_str(), "x")).collect();
    let tgt: Vec<(&str, &str)> = tids.iter().map(|t| (t.as_str(), "x")).collect();
    let mut links = Vec::new();
    for s in &sids {
        let k = rng.gen_range(2..=3);
        for t in tids.choose_multiple(&mut rng, k) {
            links.push((s.as_str(), t.as_str()));
        }
    }
    let ds = write_dataset(root, &src, &tgt, &links);
    let dim = 6;
    let mut mat = |ids: &[String]| {
        let rows = ids
            .iter()
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        EmbeddingMatrix::from_rows(ids.to_vec(), rows).unwrap()
    };
    let (sm, tm) = (mat(&sids), mat(&tids));
    let sa = root.join("sa.vec");
    let ta = root.join("ta.vec");
    fs::write(&sa, write_vectors(&sm)).unwrap();
    fs::write(&ta, write_vectors(&tm)).unwrap();
    spec_for(&ds, Backend::Vectors { sources: sa, targets: ta })
}

#[test]
fn grid_cells_match_independent_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = random_vector_dataset(tmp.path(), 5, 12, 7);
    let grid = grid_search(&spec, 0.1).unwrap();
    assert_eq!(grid.cells.len(), 100);
    let mut rng = StdRng::seed_from_u64(1);
    for cell in grid.cells.choose_multiple(&mut rng, 3) {
        let mut s = spec.clone();
        s.reward = RewardConfig::new(cell.k1, cell.k2).unwrap();
        let report = run_pipeline(&s).unwrap().report;
        assert_eq!(report.map.to_bits(), cell.map.to_bits(), "{cell:?}");
    }
    let best = grid.cells.iter().map(|c| c.map).fold(f64::MIN, f64::max);
    assert_eq!(grid.best.map, best);
    assert_eq!(grid.best, *grid.cells.iter().find(|c| c.map == best).unwrap());
}

#[test]
fn grid_is_independent_of_evaluation_order() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = random_vector_dataset(tmp.path(), 4, 9, 11);
    let prepared = prepare(&spec).unwrap();
    let grid = grid_on(&prepared, &spec.reward, 0.2).unwrap();
    let mut order: Vec<usize> = (0..grid.cells.len()).collect();
    order.shuffle(&mut StdRng::seed_from_u64(3));
    for i in order {
        let c = grid.cells[i];
        let cfg = RewardConfig::new(c.k1, c.k2).unwrap();
        let map = prepared.outcome(&cfg).unwrap().report.map;
        assert_eq!(map.to_bits(), c.map.to_bits());
    }
    assert_eq!(grid, grid_on(&prepared, &spec.reward, 0.2).unwrap());
}

#[test]
fn degenerate_grid_picks_smallest_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = write_dataset(
        tmp.path(),
        &[("S1", "s")],
        &[("A", "a"), ("B", "b"), ("C", "c")],
        &[("S1", "A")],
    );
    let sa = tmp.path().join("sa.vec");
    let ta = tmp.path().join("ta.vec");
    // all targets identical: every cosine is equal and rewards are zero
    fs::write(&sa, "VEC 1 1 2\nS1\t1 0\n").unwrap();
    fs::write(&ta, "VEC 1 3 2\nA\t1 1\nB\t1 1\nC\t1 1\n").unwrap();
    let spec = spec_for(&ds, Backend::Vectors { sources: sa, targets: ta });
    let grid = grid_search(&spec, 0.25).unwrap();
    assert!(grid.cells.iter().all(|c| c.map == grid.cells[0].map));
    assert_eq!((grid.best.k1, grid.best.k2), (0.25, 0.25));
}

#[test]
fn ablation_without_equals_disabled_run() {
    let tmp = tempfile::tempdir().unwrap();
    let mut spec = random_vector_dataset(tmp.path(), 5, 10, 21);
    spec.reward = RewardConfig::new(0.2, 0.3).unwrap();
    let ab = ablation(&spec).unwrap();
    let mut off = spec.clone();
    off.reward = spec.reward.disabled();
    let plain = run_pipeline(&off).unwrap();
    assert_eq!(ab.without.report, plain.report);
    assert_eq!(ab.without.lists, plain.lists);
    let mut on = spec.clone();
    on.reward.rewarding_enabled = true;
    assert_eq!(ab.with.report, run_pipeline(&on).unwrap().report);
}

#[test]
fn promotion_fixture_improves_map() {
    let tmp = tempfile::tempdir().unwrap();
    let (ds, sa, ta) = promotion_fixture(tmp.path());
    let spec = spec_for(&ds, Backend::Vectors { sources: sa, targets: ta });
    let ab = ablation(&spec).unwrap();
    assert!(ab.with.report.map > ab.without.report.map);
}

#[test]
fn minimal_thresholds_move_one_target_per_hpta() {
    let tmp = tempfile::tempdir().unwrap();
    let mut spec = random_vector_dataset(tmp.path(), 4, 10, 5);
    spec.reward = RewardConfig::new(0.01, 0.01).unwrap();
    let prepared = prepare(&spec).unwrap();
    let on = prepared.outcome(&spec.reward).unwrap();
    let off = prepared.outcome(&spec.reward.disabled()).unwrap();
    for (sa, before) in &off.lists {
        let hpta = &before.entries[0].id;
        let trta = prepared.ranking.ta_lists[hpta].entries[0].id.clone();
        for e in &before.entries {
            let after = on.lists[sa].score_of(&e.id).unwrap();
            if e.id != trta {
                assert_eq!(after, e.score, "{sa} {}", e.id);
            }
        }
        let rows: Vec<_> = on.trace.records.iter().filter(|r| &r.sa_id == sa).collect();
        assert_eq!(rows.len(), 1);
        assert_eq!((&rows[0].hpta_id, &rows[0].trta_id), (hpta, &trta));
    }
}

#[test]
fn vector_files_round_trip_bit_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = StdRng::seed_from_u64(9);
    let ids: Vec<String> = (0..20).map(|i| format!("id-{i}")).collect();
    let rows = ids
        .iter()
        .map(|_| (0..7).map(|_| rng.gen::<f64>() * 10f64.powi(rng.gen_range(-30..30))).collect())
        .collect();
    let m = EmbeddingMatrix::from_rows(ids.clone(), rows).unwrap();
    let path = tmp.path().join("v.vec");
    fs::write(&path, write_vectors(&m)).unwrap();
    let mut shuffled = ids.clone();
    shuffled.shuffle(&mut rng);
    let back = read_vectors(&path, &shuffled).unwrap();
    for id in &ids {
        let a = m.row(m.position(id).unwrap());
        let b = back.row(back.position(id).unwrap());
        assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn wordvec_backend_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = small_fixture(tmp.path());
    let table = tmp.path().join("words.txt");
    fs::write(
        &table,
        "5 2\nlogin 1 0\npassword 0.9 0.1\ninvoice 0 1\nreport 0.1 0.9\npatient 0.5 0.5\n",
    )
    .unwrap();
    let spec = spec_for(&ds, Backend::WordVec { table });
    let out = run_pipeline(&spec).unwrap();
    assert_eq!(out.lists["UC2"].entries[0].id, "TC2");
    assert!(out.report.map > 0.0);
}
