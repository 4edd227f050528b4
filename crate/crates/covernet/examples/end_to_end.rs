//! Minimal end-to-end walkthrough: generate a collection, detect
//! communities, re-rank retrieval with them, and locate prototypes.
//!
//! ```bash
//! cargo run --release -p covernet --example end_to_end
//! ```

use covernet::datasets::{generate_collection, sample_setup, GeneratorParams, SetupSpec};
use covernet::eval::{map_score, per_song_f, refine_matrix, relative_map_increase};
use covernet::experiment::{detect, Algorithm, AlgorithmParams};
use covernet::prototype::{run_prototype_experiment, PrototypeMethod};

fn main() {
    let (base, base_matrix) =
        generate_collection(&GeneratorParams::default(), 523, 42).expect("valid params");
    println!("collection: {} items in 523 groups", base.n());

    // One sampled trial of the 500-item setup.
    let spec = SetupSpec::standard("2.1", 7).expect("known setup");
    let (collection, matrix) = sample_setup(&base, &base_matrix, &spec, 0).expect("sampled");
    let sym = matrix.symmetrize();
    let truth = collection.truth_partition();

    for algorithm in [Algorithm::Pm1, Algorithm::Mo, Algorithm::Upgma] {
        let params = AlgorithmParams::tuned_for(algorithm);
        let communities = detect(algorithm, &sym, &params, 1).expect("detector runs");
        let f = per_song_f(&communities, &truth).expect("same size").f;

        let baseline = map_score(&sym, &truth).expect("queries exist");
        let refined = refine_matrix(&sym, &communities, params.refine_c).expect("refinable");
        let improved = map_score(&refined, &truth).expect("queries exist");
        let delta = relative_map_increase(improved, baseline).expect("positive baseline");
        println!(
            "{:>5}: F = {f:.3}, MAP {baseline:.3} -> {improved:.3} ({delta:+.2}%)",
            algorithm.name()
        );
    }

    // Prototype detection over the ground-truth communities.
    let rows =
        run_prototype_experiment(&base, &base_matrix, PrototypeMethod::Closeness, 9).unwrap();
    for row in rows {
        println!(
            "closeness C={}: {:>5.1}% hits over {} communities (p = {:.2e})",
            row.cardinality,
            100.0 * row.hit_rate,
            row.trials,
            row.p_value
        );
    }
}
