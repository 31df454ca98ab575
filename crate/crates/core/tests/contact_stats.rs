//! Monte Carlo checks of the contact-process simulator against exact values.

use contact_meta::birthdeath::{complete_graph_spec, expected_hitting_times};
use contact_meta::contact::{
    estimate_mean_extinction, infected_trajectory, ContactConfig, ContactProcess, Event,
};
use contact_meta::graph::Graph;
use contact_meta::rng::{stream, Purpose};

fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1)))).unwrap()
}

fn within_3se(mean: f64, se: f64, want: f64) -> bool {
    (mean - want).abs() <= 3.0 * se
}

#[test]
fn isolated_node_is_exponential() {
    let g = Graph::from_edges(1, std::iter::empty()).unwrap();
    let est = estimate_mean_extinction(&g, &ContactConfig::new(2.0).with_seed(1), 100_000).unwrap();
    let (mean, se) = (est.mean.unwrap(), est.stderr.unwrap());
    assert!(within_3se(mean, se, 1.0), "{mean} ± {se}");
    assert!((se - 1.0 / 100_000f64.sqrt()).abs() < 2e-4);
    assert_eq!(est.censored_count, 0);
}

#[test]
fn isolated_node_small_run_stderr() {
    let g = Graph::from_edges(1, std::iter::empty()).unwrap();
    let est = estimate_mean_extinction(&g, &ContactConfig::new(1.0).with_seed(2), 10_000).unwrap();
    assert!(within_3se(est.mean.unwrap(), est.stderr.unwrap(), 1.0));
    assert!((est.stderr.unwrap() - 0.01).abs() < 1e-3);
}

#[test]
fn two_nodes_without_infection_take_max_of_exponentials() {
    let g = Graph::from_edges(2, [(0, 1, 1)]).unwrap();
    let est = estimate_mean_extinction(&g, &ContactConfig::new(0.0).with_seed(3), 100_000).unwrap();
    assert!(within_3se(est.mean.unwrap(), est.stderr.unwrap(), 1.5));
}

#[test]
fn pure_death_chain_gives_harmonic_numbers() {
    for n in [5usize, 17] {
        let g = complete(n);
        let est = estimate_mean_extinction(&g, &ContactConfig::new(0.0).with_seed(n as u64), 100_000).unwrap();
        let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        assert!(within_3se(est.mean.unwrap(), est.stderr.unwrap(), harmonic), "n = {n}");
    }
}

#[test]
fn complete_graph_matches_birth_death_oracle() {
    let (n, lam) = (30usize, 0.8);
    let exact = expected_hitting_times(&complete_graph_spec(n, lam).unwrap()).at(n).value();
    let cfg = ContactConfig::new(lam / n as f64).with_seed(4);
    let est = estimate_mean_extinction(&complete(n), &cfg, 10_000).unwrap();
    assert!(within_3se(est.mean.unwrap(), est.stderr.unwrap(), exact), "{est:?} vs {exact}");
}

#[test]
fn partial_initial_set_on_complete_graph() {
    let (n, lam) = (12usize, 1.5);
    let exact = expected_hitting_times(&complete_graph_spec(n, lam).unwrap()).at(3).value();
    let cfg = ContactConfig::new(lam / n as f64).with_initial(vec![0, 5, 7]).with_seed(5);
    let est = estimate_mean_extinction(&complete(n), &cfg, 20_000).unwrap();
    assert!(within_3se(est.mean.unwrap(), est.stderr.unwrap(), exact));
}

#[test]
fn supercritical_plateau() {
    let (n, lam) = (50usize, 3.0);
    let cfg = ContactConfig::new(lam / n as f64).with_seed(6);
    let times: Vec<f64> = (0..=450).map(|i| 5.0 + i as f64 * 0.1).collect();
    let traj = infected_trajectory(&complete(n), &cfg, &times).unwrap();
    let centre = n as f64 * (1.0 - 1.0 / lam);
    let avg = traj.iter().sum::<usize>() as f64 / traj.len() as f64;
    assert!((avg - centre).abs() < 3.0, "average {avg} vs {centre}");
    // stationary sd is about sqrt(N/λ) ≈ 4
    assert!(traj.iter().all(|&k| (k as f64 - centre).abs() < 20.0));
    assert_eq!(infected_trajectory(&complete(n), &cfg, &[0.0]).unwrap(), vec![n]);
}

#[test]
fn jump_chain_matches_birth_death_transitions() {
    let (n, tau) = (20usize, 0.1);
    let g = complete(n);
    let mut ups = vec![0u64; n + 1];
    let mut visits = vec![0u64; n + 1];
    for r in 0..400 {
        let cfg = ContactConfig::new(tau);
        let mut p = ContactProcess::new(&g, &cfg, stream(7, Purpose::Replication, r)).unwrap();
        for _ in 0..2_000 {
            let k = p.infected_count();
            match p.apply_event() {
                Event::Infect(_) => ups[k] += 1,
                Event::Heal(_) => {}
                Event::Extinct => break,
            }
            visits[k] += 1;
        }
    }
    let mut checked = 0;
    for k in 1..n {
        if visits[k] < 200 {
            continue;
        }
        let birth = tau * (k * (n - k)) as f64;
        let p = birth / (birth + k as f64);
        let v = visits[k] as f64;
        let sd = (p * (1.0 - p) / v).sqrt();
        let freq = ups[k] as f64 / v;
        assert!((freq - p).abs() <= 3.0 * sd, "state {k}: {freq} vs {p}");
        checked += 1;
    }
    assert!(checked >= 10);
}
