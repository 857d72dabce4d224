//! Evaluation scores checked against independent hand-stepped oracles
//! on synthetic traces, plus exact fitness arithmetic.

use std::collections::BTreeMap;

use wayfarer_core::agent::{
    AgentParams, TickRecord, TraceEvent, TraceHeader, TraceLog, TICK_DT,
};
use wayfarer_core::eval::{
    coverage, fitness, inspection, novelty_avg, novelty_series, region_entropy,
    region_entropy_bits, required_configs, EpisodeScores, EvalParams, FitnessParams,
    NoveltyParams, REGION_COUNT,
};
use wayfarer_core::geom::Vec3;
use wayfarer_core::rng::Rng;
use wayfarer_core::wfcgen::{default_tileset, Rotation, TILE_SIZE};
use wayfarer_core::world::{build_level, Level, PlacedTile, WorldObject};

fn header() -> TraceHeader {
    TraceHeader {
        level_id: "synthetic".to_string(),
        agent: "all".to_string(),
        seed: 0,
        spawn: Vec3::new(175.0, 2.0, 175.0),
        params: AgentParams::default(),
    }
}

/// Trace whose tick i sits at `positions[i]` and sees `visible[i]`.
fn synth_trace(positions: &[(f64, f64)], visible: &[Vec<String>]) -> TraceLog {
    assert_eq!(positions.len(), visible.len());
    let events = positions
        .iter()
        .zip(visible)
        .enumerate()
        .map(|(i, (&(x, z), ids))| {
            TraceEvent::Tick(TickRecord {
                time: (i + 1) as f64 * TICK_DT,
                position: Vec3::new(x, 2.0, z),
                heading_deg: 0.0,
                visible: ids.clone(),
            })
        })
        .collect();
    TraceLog {
        header: header(),
        events,
    }
}

fn still_trace(visible: &[Vec<String>]) -> TraceLog {
    let positions = vec![(175.0, 175.0); visible.len()];
    synth_trace(&positions, visible)
}

fn flat_level(objects: Vec<WorldObject>) -> Level {
    let set = default_tileset();
    let tiles = (0..7)
        .flat_map(|row| {
            (0..7).map(move |col| PlacedTile {
                tile_id: 0,
                rotation: Rotation::R0,
                row,
                col,
            })
        })
        .collect();
    build_level("synthetic", "default", tiles, &set, Some(objects)).unwrap()
}

fn obj(id: &str, x: f64, z: f64) -> WorldObject {
    WorldObject {
        id: id.to_string(),
        kind: id.split('.').next().unwrap().to_string(),
        position: Vec3::new(x, 1.0, z),
        size: Vec3::new(2.0, 2.0, 2.0),
        blocking: false,
    }
}

/// The novelty recurrence, written as the three explicit cases: debut
/// kinds start at the ceiling and are penalized once after
/// contributing; every other tracked kind recovers, clamped to the
/// ceiling. Pre-update values of the visible kinds sum into the tick.
fn novelty_oracle(visible: &[Vec<String>], p: &NoveltyParams) -> Vec<f64> {
    let mut value: BTreeMap<String, f64> = BTreeMap::new();
    let mut seen: BTreeMap<String, bool> = BTreeMap::new();
    let mut series = Vec::new();
    for ids in visible {
        let kinds: std::collections::BTreeSet<String> = ids
            .iter()
            .map(|id| id.split('.').next().unwrap().to_string())
            .collect();
        for k in &kinds {
            value.entry(k.clone()).or_insert(p.max);
            seen.entry(k.clone()).or_insert(false);
        }
        series.push(kinds.iter().map(|k| value[k]).sum());
        for (k, v) in value.iter_mut() {
            if kinds.contains(k) && !seen[k] {
                *v = (*v - p.penalty).max(0.0);
                *seen.get_mut(k).unwrap() = true;
            } else {
                *v = (*v + p.rate * TICK_DT).min(p.max);
            }
        }
    }
    series
}

#[test]
fn novelty_matches_stepwise_oracle_on_randomized_sequences() {
    let kinds = ["tree", "rock", "bush", "hut", "well", "statue"];
    let params = NoveltyParams::default();
    let mut rng = Rng::from_seed(0x6e6f76);
    for case in 0..100 {
        let len = 50 + rng.usize_below(200);
        let visible: Vec<Vec<String>> = (0..len)
            .map(|_| {
                kinds
                    .iter()
                    .filter(|_| rng.f64() < 0.3)
                    .enumerate()
                    .map(|(i, k)| format!("{k}.{i}"))
                    .collect()
            })
            .collect();
        let trace = still_trace(&visible);
        let got = novelty_series(&trace, &params);
        let want = novelty_oracle(&visible, &params);
        assert_eq!(got.len(), want.len());
        for (tick, (g, w)) in got.iter().zip(&want).enumerate() {
            assert!(
                (g - w).abs() <= 1e-12,
                "case {case} tick {tick}: {g} vs oracle {w}"
            );
        }
        let mean = want.iter().sum::<f64>() / want.len() as f64;
        let avg = novelty_avg(&trace, &params);
        assert!((avg - mean.clamp(0.0, 1.0)).abs() <= 1e-12);
    }
}

#[test]
fn novelty_recovers_in_exactly_34_ticks() {
    // Debut at tick 0 spends the kind to 0; at 0.03/s and 0.1 s ticks
    // it is back at the 0.1 ceiling 34 ticks later, not 33.
    let see = vec!["tree.0".to_string()];
    let none: Vec<String> = Vec::new();

    let mut at34 = vec![see.clone()];
    at34.extend(vec![none.clone(); 33]);
    at34.push(see.clone());
    let series = novelty_series(&still_trace(&at34), &NoveltyParams::default());
    assert!((series[34] - 0.099).abs() <= 1e-12, "one tick short: {}", series[34]);

    let mut at35 = vec![see.clone()];
    at35.extend(vec![none; 34]);
    at35.push(see);
    let series = novelty_series(&still_trace(&at35), &NoveltyParams::default());
    assert!((series[35] - 0.1).abs() <= 1e-12, "fully recovered: {}", series[35]);
}

#[test]
fn entropy_hits_the_exact_reference_points() {
    let params = EvalParams::default();

    // One tick in each of the 49 regions: maximal entropy.
    let all: Vec<(f64, f64)> = (0..7)
        .flat_map(|r| (0..7).map(move |c| (25.0 + 50.0 * c as f64, 25.0 + 50.0 * r as f64)))
        .collect();
    let visible = vec![Vec::new(); all.len()];
    let uniform = synth_trace(&all, &visible);
    assert!((region_entropy(&uniform, &params) - 1.0).abs() <= 1e-9);
    assert!((coverage(&uniform) - 1.0).abs() == 0.0);

    // Never leaving one region: zero entropy, 1/49 coverage.
    let still = still_trace(&vec![Vec::new(); 40]);
    assert_eq!(region_entropy(&still, &params), 0.0);
    assert!((coverage(&still) - 1.0 / 49.0).abs() <= 1e-15);

    // Ticks split 2/1/1 over three regions: 1.5 bits.
    let split = synth_trace(
        &[(25.0, 25.0), (25.0, 25.0), (75.0, 25.0), (75.0, 75.0)],
        &vec![Vec::new(); 4],
    );
    let bits = region_entropy_bits(&split);
    assert!((bits - 1.5).abs() <= 1e-12, "bits {bits}");
    let norm = region_entropy(&split, &params);
    assert!((norm - 1.5 / (REGION_COUNT as f64).log2()).abs() <= 1e-12);
    assert!((norm - 0.2672).abs() <= 5e-5);

    // Region labels carry no weight: permuting which regions host the
    // same visit counts leaves the value unchanged.
    let swapped = synth_trace(
        &[(325.0, 325.0), (325.0, 325.0), (25.0, 125.0), (75.0, 225.0)],
        &vec![Vec::new(); 4],
    );
    assert!((region_entropy_bits(&swapped) - bits).abs() <= 1e-12);

    // Repeating the trace scales every count equally: same entropy.
    let doubled = synth_trace(
        &[
            (25.0, 25.0),
            (25.0, 25.0),
            (75.0, 25.0),
            (75.0, 75.0),
            (25.0, 25.0),
            (25.0, 25.0),
            (75.0, 25.0),
            (75.0, 75.0),
        ],
        &vec![Vec::new(); 8],
    );
    assert!((region_entropy_bits(&doubled) - bits).abs() <= 1e-12);
}

#[test]
fn coverage_counts_distinct_regions() {
    let three = synth_trace(
        &[(10.0, 10.0), (60.0, 10.0), (60.0, 60.0), (60.0, 60.0)],
        &vec![Vec::new(); 4],
    );
    assert!((coverage(&three) - 3.0 / 49.0).abs() <= 1e-15);
}

#[test]
fn inspection_is_the_fraction_of_objects_approached() {
    let level = flat_level(vec![
        obj("rock.a", 100.0, 100.0),
        obj("rock.b", 300.0, 100.0),
        obj("rock.c", 100.0, 300.0),
        obj("rock.d", 300.0, 300.0),
    ]);
    // One pass at 9.9 units of rock.a; everything else stays far away.
    let trace = synth_trace(&[(109.9, 100.0), (175.0, 175.0)], &vec![Vec::new(); 2]);
    assert!((inspection(&trace, &level) - 0.25).abs() <= 1e-15);

    let far = synth_trace(&[(175.0, 175.0)], &vec![Vec::new(); 1]);
    assert_eq!(inspection(&far, &level), 0.0);

    // 10.0 is inside the threshold, 10.01 is not.
    let edge = synth_trace(&[(110.0, 100.0)], &vec![Vec::new(); 1]);
    assert!((inspection(&edge, &level) - 0.25).abs() <= 1e-15);
    let out = synth_trace(&[(110.01, 100.0)], &vec![Vec::new(); 1]);
    assert_eq!(inspection(&out, &level), 0.0);
}

fn scores(coverage: f64, entropy: f64, inspection: f64, m: f64, n: f64) -> EpisodeScores {
    EpisodeScores {
        coverage,
        entropy,
        inspection,
        novelty: n,
        motivation: Some(m),
    }
}

fn results_for(
    spawns: usize,
    per_config: impl Fn(&str) -> EpisodeScores,
) -> BTreeMap<String, Vec<EpisodeScores>> {
    required_configs()
        .iter()
        .map(|c| {
            let token = c.token();
            let s = per_config(&token);
            (token, vec![s; spawns])
        })
        .collect()
}

#[test]
fn fitness_reproduces_the_reference_arithmetic() {
    let params = FitnessParams::default();

    // Coverage outside its window zeroes a config no matter how strong
    // the rest looks.
    let gated = results_for(3, |_| scores(0.10, 0.5, 0.5, 1.0, 1.0));
    let report = fitness("gated", &gated, &params).unwrap();
    assert_eq!(report.total, 0.0);
    assert!(report.rows.iter().all(|r| r.fitness == 0.0 && !r.gates.coverage));

    // Every config passing with unit motivation and novelty sums the
    // weights: 5 x 0.1 + 0.5 = 1.
    let full = results_for(3, |_| scores(0.5, 0.5, 0.5, 1.0, 1.0));
    let report = fitness("full", &full, &params).unwrap();
    assert!((report.total - 1.0).abs() <= 1e-12);

    // Only the all-metrics config passes, with M 0.8 and N 0.5:
    // F = 0.5 x 0.4 = 0.2.
    let partial = results_for(3, |token| {
        if token == "all" {
            scores(0.5, 0.5, 0.5, 0.8, 0.5)
        } else {
            scores(0.10, 0.5, 0.5, 1.0, 1.0)
        }
    });
    let report = fitness("partial", &partial, &params).unwrap();
    assert!((report.total - 0.2).abs() <= 1e-12);
}

#[test]
fn gates_are_sharp_at_their_boundaries() {
    let params = FitnessParams::default();
    let total = |cov: f64, ent: f64, ins: f64| {
        // Single spawn keeps the averaged value bit-exact at the boundary.
        let results = results_for(1, |_| scores(cov, ent, ins, 1.0, 1.0));
        fitness("edge", &results, &params).unwrap().total
    };
    // Closed coverage window [0.20, 0.80].
    assert_eq!(total(0.1999, 0.5, 0.5), 0.0);
    assert!(total(0.20, 0.5, 0.5) > 0.0);
    assert!(total(0.80, 0.5, 0.5) > 0.0);
    assert_eq!(total(0.8001, 0.5, 0.5), 0.0);
    // Entropy cap at 0.9 inclusive.
    assert!(total(0.5, 0.9, 0.5) > 0.0);
    assert_eq!(total(0.5, 0.9001, 0.5), 0.0);
    // Inspection in (0.10, 0.80]: strictly above the floor.
    assert_eq!(total(0.5, 0.5, 0.10), 0.0);
    assert!(total(0.5, 0.5, 0.1001) > 0.0);
    assert!(total(0.5, 0.5, 0.80) > 0.0);
    assert_eq!(total(0.5, 0.5, 0.8001), 0.0);
}
