//! Transportation simplex on a dense cost matrix.
//!
//! Starts from the northwest-corner basis and pivots on the first cell (in
//! row-major order) with negative reduced cost. The leaving cell is the
//! minimum-flow cell on the losing side of the cycle, ties broken by
//! smallest row then column. This is Bland's rule on the network, so
//! degenerate bases cannot cycle.

use crate::scalar::Scalar;

pub(crate) struct Solution<S> {
    pub flow: Vec<S>,
    pub cost: S,
}

pub(crate) fn solve<S: Scalar>(supply: &[S], demand: &[S], cost: &[S]) -> Solution<S> {
    let m = supply.len();
    let n = demand.len();
    debug_assert_eq!(cost.len(), m * n);
    let mut flow = vec![S::zero(); m * n];
    let mut basic = northwest_corner(supply, demand, &mut flow);
    let mut u = vec![S::zero(); m];
    let mut v = vec![S::zero(); n];
    loop {
        potentials(m, n, &basic, cost, &mut u, &mut v);
        let entering = (0..m * n).find(|&c| {
            let (i, j) = (c / n, c % n);
            !basic.contains(&c) && !S::le_tol(&(u[i].clone() + v[j].clone()), &cost[c])
        });
        let Some(enter) = entering else { break };
        let path = tree_path(m, n, &basic, enter / n, enter % n);
        // path runs from row `i` to column `j`; cells alternate, starting
        // and ending with cells that lose flow
        let k = path.len();
        let losing: Vec<usize> = (0..k)
            .filter(|t| (k - 1 - t) % 2 == 0)
            .map(|t| path[t])
            .collect();
        let leave = *losing
            .iter()
            .min_by(|&&a, &&b| {
                flow[a]
                    .partial_cmp(&flow[b])
                    .expect("comparable flows")
                    .then(a.cmp(&b))
            })
            .expect("cycle has a losing cell");
        let theta = flow[leave].clone();
        for (t, &c) in path.iter().enumerate() {
            if (k - 1 - t) % 2 == 0 {
                flow[c] = flow[c].clone() - theta.clone();
            } else {
                flow[c] = flow[c].clone() + theta.clone();
            }
        }
        flow[enter] = theta;
        flow[leave] = S::zero();
        let pos = basic
            .iter()
            .position(|&c| c == leave)
            .expect("leaving cell is basic");
        basic[pos] = enter;
    }
    let cost = basic
        .iter()
        .fold(S::zero(), |acc, &c| acc + flow[c].clone() * cost[c].clone());
    Solution { flow, cost }
}

/// Degenerate ties move down, so the basis always has `m + n - 1` cells.
fn northwest_corner<S: Scalar>(supply: &[S], demand: &[S], flow: &mut [S]) -> Vec<usize> {
    let (m, n) = (supply.len(), demand.len());
    let mut a = supply.to_vec();
    let mut b = demand.to_vec();
    let (mut i, mut j) = (0, 0);
    let mut basic = Vec::with_capacity(m + n - 1);
    loop {
        let row_done = a[i] <= b[j];
        let x = if row_done { a[i].clone() } else { b[j].clone() };
        flow[i * n + j] = x.clone();
        basic.push(i * n + j);
        if i == m - 1 && j == n - 1 {
            break;
        }
        if i < m - 1 && (row_done || j == n - 1) {
            b[j] = b[j].clone() - x;
            a[i] = S::zero();
            i += 1;
        } else {
            a[i] = a[i].clone() - x;
            b[j] = S::zero();
            j += 1;
        }
    }
    basic
}

/// Solves `u_i + v_j = c_ij` on the basis tree with `u_0 = 0`.
fn potentials<S: Scalar>(
    m: usize,
    n: usize,
    basic: &[usize],
    cost: &[S],
    u: &mut [S],
    v: &mut [S],
) {
    let mut row_set = vec![false; m];
    let mut col_set = vec![false; n];
    row_set[0] = true;
    u[0] = S::zero();
    let mut stack = vec![(true, 0usize)];
    while let Some((is_row, k)) = stack.pop() {
        for &c in basic {
            let (i, j) = (c / n, c % n);
            if is_row && i == k && !col_set[j] {
                v[j] = cost[c].clone() - u[i].clone();
                col_set[j] = true;
                stack.push((false, j));
            } else if !is_row && j == k && !row_set[i] {
                u[i] = cost[c].clone() - v[j].clone();
                row_set[i] = true;
                stack.push((true, i));
            }
        }
    }
}

/// Basic cells on the tree path from row `r` to column `col`, in order.
fn tree_path(m: usize, n: usize, basic: &[usize], r: usize, col: usize) -> Vec<usize> {
    // nodes: rows 0..m, columns m..m+n; parent edge is a basic cell
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    seen[r] = true;
    let mut queue = std::collections::VecDeque::from([r]);
    while let Some(node) = queue.pop_front() {
        if node == m + col {
            break;
        }
        for &c in basic {
            let (i, j) = (c / n, c % n);
            let next = if node < m && i == node {
                m + j
            } else if node >= m && j == node - m {
                i
            } else {
                continue;
            };
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, c));
                queue.push_back(next);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = m + col;
    while let Some((prev, c)) = parent[node] {
        path.push(c);
        node = prev;
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn northwest_corner_is_a_spanning_basis() {
        let mut flow = vec![q(0, 1); 6];
        let basic = northwest_corner(&[q(1, 2), q(1, 2)], &[q(1, 2), q(1, 4), q(1, 4)], &mut flow);
        assert_eq!(basic, vec![0, 3, 4, 5]);
        assert_eq!(flow[3], q(0, 1));
    }

    #[test]
    fn classic_three_by_three() {
        // supplies 20/30/50, demands 30/30/40 (scaled by 1/100)
        let s = [q(20, 100), q(30, 100), q(50, 100)];
        let d = [q(30, 100), q(30, 100), q(40, 100)];
        let raw = [8i64, 6, 10, 9, 12, 13, 14, 9, 16];
        let c: Vec<Rational> = raw.iter().map(|&x| q(x, 1)).collect();
        let sol = solve(&s, &d, &c);
        // integral data, so the optimum is attained on the integer grid
        let mut best: Option<Rational> = None;
        for x00 in 0..=20 {
            for x01 in 0..=20 - x00 {
                for x10 in 0..=30 {
                    for x11 in 0..=30 - x10 {
                        let x02 = 20 - x00 - x01;
                        let x12 = 30 - x10 - x11;
                        let x20 = 30 - x00 - x10;
                        let x21 = 30 - x01 - x11;
                        let x22 = 40 - x02 - x12;
                        if x20 < 0 || x21 < 0 || x22 < 0 {
                            continue;
                        }
                        let xs = [x00, x01, x02, x10, x11, x12, x20, x21, x22];
                        let total: i64 = xs.iter().zip(&raw).map(|(x, c)| x * c).sum();
                        let v = q(total, 100);
                        best = Some(match best {
                            Some(b) if b <= v => b,
                            _ => v,
                        });
                    }
                }
            }
        }
        assert_eq!(sol.cost, best.unwrap());
    }
}
