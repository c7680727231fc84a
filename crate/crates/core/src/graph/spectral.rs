use super::Graph;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub eigenvalue: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Largest adjacency eigenvalue of `g`, within `tol`.
///
/// Every [`Graph`] is regular, and the all-ones vector is then an exact
/// Perron eigenvector, so this returns the degree without iterating.
/// [`spectral_radius_by_power_iteration`] runs the iteration regardless.
pub fn spectral_radius(g: &Graph, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    Ok(g.degree() as f64)
}

pub fn spectral_radius_by_power_iteration(g: &Graph, tol: f64) -> Result<PowerIteration> {
    let neighbors: Vec<Vec<usize>> = (0..g.num_vertices()).map(|v| g.adjacency(v).iter().map(|&(w, _)| w).collect()).collect();
    power_iteration_radius(&neighbors, tol, MAX_ITERATIONS)
}

/// Power iteration for the largest eigenvalue of the adjacency operator
/// given by `neighbors`, which must describe a connected undirected graph.
///
/// Iterates on `A + I` so that bipartite graphs (where `-λ` is also an
/// eigenvalue) still converge, starting from the all-ones vector. Stops when
/// the residual `|Ax - λx|` of the Rayleigh quotient drops below `tol`,
/// which bounds the distance to the nearest eigenvalue.
pub fn power_iteration_radius(neighbors: &[Vec<usize>], tol: f64, max_iterations: usize) -> Result<PowerIteration> {
    let n = neighbors.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for (v, nb) in neighbors.iter().enumerate() {
            out[v] = nb.iter().map(|&w| x[w]).sum();
        }
    };
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut ax = vec![0.0; n];
    for iteration in 0..=max_iterations {
        apply(&x, &mut ax);
        let lambda: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let residual = x.iter().zip(&ax).map(|(a, b)| (b - lambda * a).powi(2)).sum::<f64>().sqrt();
        if residual <= tol {
            return Ok(PowerIteration { eigenvalue: lambda, iterations: iteration, residual });
        }
        for (xi, axi) in x.iter_mut().zip(&ax) {
            *xi += axi;
        }
        let s = norm(&x);
        if !(s > 0.0) {
            return Err(Error::NumericFailure("power iteration collapsed to zero".into()));
        }
        x.iter_mut().for_each(|xi| *xi /= s);
    }
    Err(Error::NumericFailure(format!("power iteration did not converge in {max_iterations} steps")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cartesian_product, gen_complete, gen_cycle, gen_hypercube};
    use approx::assert_abs_diff_eq;

    #[test]
    fn regular_graphs_return_degree() {
        assert_eq!(spectral_radius(&gen_complete(5).unwrap(), DEFAULT_TOL).unwrap(), 4.0);
        assert_eq!(spectral_radius(&gen_cycle(8).unwrap(), DEFAULT_TOL).unwrap(), 2.0);
        let p = cartesian_product(&gen_complete(4).unwrap(), &gen_complete(2).unwrap()).unwrap();
        assert_eq!(spectral_radius(&p, DEFAULT_TOL).unwrap(), 4.0);
        assert!(spectral_radius(&p, 0.0).is_err());
    }

    #[test]
    fn power_iteration_agrees_on_regular_graphs() {
        for g in [gen_complete(7).unwrap(), gen_cycle(8).unwrap(), gen_hypercube(4).unwrap()] {
            let r = spectral_radius_by_power_iteration(&g, DEFAULT_TOL).unwrap();
            assert_abs_diff_eq!(r.eigenvalue, g.degree() as f64, epsilon = 1e-9);
            assert_eq!(r.iterations, 0);
        }
    }

    fn path(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|v| [v.wrapping_sub(1), v + 1].into_iter().filter(|&w| w < n).collect()).collect()
    }

    #[test]
    fn path_graph_matches_closed_form() {
        for n in [2, 3, 5, 9] {
            let expected = 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
            let r = power_iteration_radius(&path(n), 1e-10, MAX_ITERATIONS).unwrap();
            assert_abs_diff_eq!(r.eigenvalue, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn star_graph_is_bipartite_but_converges() {
        // K_{1,4}: largest eigenvalue 2, smallest -2
        let mut nb = vec![vec![1, 2, 3, 4]];
        nb.extend((0..4).map(|_| vec![0]));
        let r = power_iteration_radius(&nb, 1e-10, MAX_ITERATIONS).unwrap();
        assert_abs_diff_eq!(r.eigenvalue, 2.0, epsilon = 1e-9);
        // average degree 8/5 <= λ <= max degree 4
        assert!(r.eigenvalue >= 1.6 && r.eigenvalue <= 4.0);
    }

    #[test]
    fn iteration_cap_reports_numeric_failure() {
        assert!(matches!(power_iteration_radius(&path(40), 1e-14, 3), Err(Error::NumericFailure(_))));
    }
}
