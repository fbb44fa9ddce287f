//! Browser bindings for the sorting-network toolkit.
//!
//! Three operations back the static demo page: verify a network (diagram,
//! clusters, sorting predicate), check subsumption between two networks
//! (prechecks, subsumption graph, both variants), and run small
//! generate-and-prune searches. Every entry point takes plain strings and
//! returns a JSON payload so the same functions are testable on the host.

use serde_json::json;
use wasm_bindgen::prelude::*;

use sortnet_core::generate::{self, FilterSet, GenerationStats};
use sortnet_core::network::ComparatorNetwork;
use sortnet_core::notation;
use sortnet_core::subsumption::{self, NetworkSignature, Variant};

mod svg;

/// Demo ceiling: browsers run single-threaded, so keep runs interactive.
const DEMO_MAX_CHANNELS: usize = 8;
const DEMO_MAX_LEVELS: usize = 16;

fn err_json(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

fn parse(text: &str, channels: u32) -> Result<ComparatorNetwork, String> {
    let channels = if channels == 0 {
        notation::infer_channels(text).map_err(|e| e.to_string())?
    } else {
        channels as usize
    };
    if channels > DEMO_MAX_CHANNELS {
        return Err(format!("demo page supports up to {DEMO_MAX_CHANNELS} channels"));
    }
    notation::parse_network(text, channels).map_err(|e| e.to_string())
}

fn network_json(net: &ComparatorNetwork) -> serde_json::Value {
    let outputs = net.outputs();
    let n = net.channels();
    let clusters: Vec<Vec<String>> = (0..=n)
        .map(|p| outputs.cluster(p).iter().map(|s| s.render(n)).collect())
        .collect();
    json!({
        "network": net.to_string(),
        "channels": n,
        "size": net.size(),
        "outputSize": outputs.len(),
        "sorting": outputs.is_sorting(),
        "clusterSizes": outputs.cluster_sizes(),
        "clusters": clusters,
        "zerosSeqs": (0..=n).map(|p| outputs.zeros_seq(p)).collect::<Vec<_>>(),
        "onesSeqs": (0..=n).map(|p| outputs.ones_seq(p)).collect::<Vec<_>>(),
        "svg": svg::knuth_diagram(net),
    })
}

/// Verify a network given in `low:high,low:high` notation. `channels = 0`
/// infers the channel count from the comparators.
#[wasm_bindgen]
pub fn demo_verify(text: &str, channels: u32) -> String {
    match parse(text, channels) {
        Ok(net) => network_json(&net).to_string(),
        Err(e) => err_json(e),
    }
}

fn outcome_json(outcome: &subsumption::SubsumptionOutcome) -> serde_json::Value {
    json!({
        "subsumes": outcome.subsumes,
        "witness": outcome.witness.as_ref().map(|w| w.to_string()),
        "rejectedBy": outcome.rejected_by.map(|r| format!("{r:?}")),
        "examined": outcome.candidates_examined,
        "verified": outcome.candidates_checked,
    })
}

/// Subsumption check between two networks, reporting the precheck verdict,
/// the subsumption graph, and the counters of both testing variants.
#[wasm_bindgen]
pub fn demo_check(text_a: &str, text_b: &str, channels: u32) -> String {
    let channels = if channels == 0 {
        let inferred = notation::infer_channels(text_a)
            .and_then(|a| Ok(a.max(notation::infer_channels(text_b)?)));
        match inferred {
            Ok(n) => n as u32,
            Err(e) => return err_json(e),
        }
    } else {
        channels
    };
    let a = match parse(text_a, channels) {
        Ok(net) => net,
        Err(e) => return err_json(format!("network A: {e}")),
    };
    let b = match parse(text_b, channels) {
        Ok(net) => net,
        Err(e) => return err_json(format!("network B: {e}")),
    };
    let out_a = a.outputs();
    let out_b = b.outputs();
    let precheck = match subsumption::precheck(
        &NetworkSignature::of(&out_a),
        &NetworkSignature::of(&out_b),
    ) {
        Ok(()) => "pass".to_string(),
        Err(stage) => format!("{stage:?}"),
    };
    let basic = subsumption::build_subsumption_graph_basic(&out_a, &out_b);
    let strengthened = subsumption::build_subsumption_graph(&out_a, &out_b);
    let v1 = subsumption::subsumes_by_permutations(&out_a, &out_b);
    let v2 = subsumption::subsumes_by_matchings(&out_a, &out_b);
    let witness = v2.witness.clone().or_else(|| v1.witness.clone());
    json!({
        "a": network_json(&a),
        "b": network_json(&b),
        "precheck": precheck,
        "graphEdges": basic.edges(),
        "strengthenedEdges": strengthened.edges(),
        "graphSvg": svg::subsumption_graph(&basic, &strengthened, witness.as_ref()),
        "permutationVariant": outcome_json(&v1),
        "matchingVariant": outcome_json(&v2),
    })
    .to_string()
}

/// Run generate-and-prune up to `k_max` levels and report per-level sizes
/// and counters. Small channel counts only; this runs on the UI thread.
#[wasm_bindgen]
pub fn demo_generate(channels: u32, k_max: u32, variant: &str) -> String {
    let variant: Variant = match variant.parse() {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    let channels = channels as usize;
    let k_max = k_max as usize;
    if !(2..=DEMO_MAX_CHANNELS).contains(&channels) {
        return err_json(format!("channels must be in 2..={DEMO_MAX_CHANNELS}"));
    }
    if !(1..=DEMO_MAX_LEVELS).contains(&k_max) {
        return err_json(format!("levels must be in 1..={DEMO_MAX_LEVELS}"));
    }
    let mut levels = Vec::new();
    let mut sorting: Option<serde_json::Value> = None;
    generate::generate_up_to(channels, k_max, variant, 1, |set: &FilterSet, stats: &GenerationStats| {
        levels.push(json!({
            "level": set.level(),
            "size": set.len(),
            "totalChecks": stats.total_checks,
            "subsumptionsFound": stats.subsumptions_found,
            "permutationsChecked": stats.permutations_checked,
            "redundantSkipped": stats.redundant_skipped,
            "elapsedMillis": stats.elapsed.as_millis() as u64,
        }));
        if sorting.is_none() {
            if let Some(entry) = set.find_sorting_network() {
                sorting = Some(json!({
                    "level": set.level(),
                    "network": entry.network.to_string(),
                    "svg": svg::knuth_diagram(&entry.network),
                }));
            }
        }
    });
    json!({
        "channels": channels,
        "variant": variant.name(),
        "levels": levels,
        "sortingNetwork": sorting,
    })
    .to_string()
}
