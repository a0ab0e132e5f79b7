//! Bundled sample traces: each exercises its interaction without errors and
//! replays to the checked-in golden snapshot log.
//!
//! Set `TOUCHVIS_BLESS=1` to rewrite the goldens after an intended change.

use std::path::PathBuf;

use touchvis_core::config::EngineConfig;
use touchvis_core::demo::DemoChart;
use touchvis_core::engine::{Engine, UpdateKind};
use touchvis_core::trace::{replay, InputTrace, SnapshotPolicy};

fn golden_path(chart: DemoChart, name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(chart.name())
        .join(format!("{name}.jsonl"))
}

#[test]
fn every_trace_runs_cleanly_and_hits_its_interaction() {
    for chart in DemoChart::ALL {
        let (spec, data) = chart.load();
        for demo in chart.traces() {
            let mut engine = Engine::new(spec.clone(), data.clone(), EngineConfig::default()).unwrap();
            let initial = engine.snapshot().to_text();
            let mut errors = Vec::new();
            for (i, e) in demo.trace.events.iter().enumerate() {
                for u in engine.process_raw(e) {
                    if let UpdateKind::Error { code, message } = u.kind {
                        errors.push(format!("event {}: {code}: {message}", i + 1));
                    }
                }
            }
            assert!(errors.is_empty(), "{}/{}: {errors:?}", chart.name(), demo.name);
            assert!(
                engine.coverage().contains(&demo.interaction),
                "{}/{} did not exercise {:?}; saw {:?}",
                chart.name(),
                demo.name,
                demo.interaction,
                engine.interactions()
            );
            // Inspection never touches the view; everything else moves history.
            let inspect_only = demo.name.contains("Inspect");
            let moved = engine.history().can_undo() || engine.history().can_redo();
            assert_eq!(moved, !inspect_only, "{}/{}", chart.name(), demo.name);
            if inspect_only {
                assert_eq!(engine.snapshot().to_text(), initial);
            }
        }
    }
}

#[test]
fn traces_survive_text_round_trip() {
    for chart in DemoChart::ALL {
        for demo in chart.traces() {
            let text = demo.trace.to_text();
            assert_eq!(InputTrace::parse(&text).unwrap(), demo.trace);
        }
    }
}

#[test]
fn replay_matches_goldens() {
    let bless = std::env::var_os("TOUCHVIS_BLESS").is_some();
    for chart in DemoChart::ALL {
        let (spec, data) = chart.load();
        for demo in chart.traces() {
            let run = || {
                replay(&spec, &data, &demo.trace, &EngineConfig::default(), SnapshotPolicy::Change)
                    .unwrap()
                    .0
                    .to_text()
            };
            let first = run();
            assert_eq!(first, run(), "{}/{} is not deterministic", chart.name(), demo.name);
            let path = golden_path(chart, &demo.name);
            if bless {
                std::fs::create_dir_all(path.parent().unwrap()).unwrap();
                std::fs::write(&path, &first).unwrap();
            } else {
                let golden = std::fs::read_to_string(&path)
                    .unwrap_or_else(|e| panic!("{}: {e} (run with TOUCHVIS_BLESS=1 to create)", path.display()));
                assert_eq!(first, golden, "{} differs from its golden", path.display());
            }
        }
    }
}
