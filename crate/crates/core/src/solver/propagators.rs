//! Domain-narrowing propagators. Each one only removes values that cannot
//! take part in a solution of its own constraint.

use super::domain::{Domain, Fail};

/// Relation of a linear form `Σ aᵢ·xᵢ + c` to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinRel {
    Le,
    Eq,
    Ne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    Linear {
        terms: Vec<(usize, i128)>,
        c: i128,
        rel: LinRel,
    },
    /// `z = x · y`
    Times { x: usize, y: usize, z: usize },
    /// `z = x / y`, truncating, `y ≠ 0`
    Div { x: usize, y: usize, z: usize },
    /// `z = cells[idx]`
    Element {
        idx: usize,
        cells: Vec<usize>,
        z: usize,
    },
    AllDiff { vars: Vec<usize> },
}

impl Prop {
    pub fn vars(&self) -> Vec<usize> {
        match self {
            Prop::Linear { terms, .. } => terms.iter().map(|t| t.0).collect(),
            Prop::Times { x, y, z } | Prop::Div { x, y, z } => vec![*x, *y, *z],
            Prop::Element { idx, cells, z } => {
                let mut v = cells.clone();
                v.push(*idx);
                v.push(*z);
                v
            }
            Prop::AllDiff { vars } => vars.clone(),
        }
    }

    pub fn propagate(&self, d: &mut [Domain]) -> Result<(), Fail> {
        match self {
            Prop::Linear { terms, c, rel } => propagate_linear(d, terms, *c, *rel),
            Prop::Times { x, y, z } => propagate_times(d, *x, *y, *z),
            Prop::Div { x, y, z } => propagate_div(d, *x, *y, *z),
            Prop::Element { idx, cells, z } => propagate_element(d, *idx, cells, *z),
            Prop::AllDiff { vars } => propagate_alldifferent(d, vars),
        }
    }

    /// Exact check on fixed arguments; `None` while some argument is open.
    pub fn holds(&self, d: &[Domain]) -> Option<bool> {
        let val = |v: usize| d[v].value().map(i128::from);
        Some(match self {
            Prop::Linear { terms, c, rel } => {
                let mut s = *c;
                for &(v, a) in terms {
                    s += a * val(v)?;
                }
                match rel {
                    LinRel::Le => s <= 0,
                    LinRel::Eq => s == 0,
                    LinRel::Ne => s != 0,
                }
            }
            Prop::Times { x, y, z } => val(*x)? * val(*y)? == val(*z)?,
            Prop::Div { x, y, z } => {
                let y = val(*y)?;
                y != 0 && val(*x)? / y == val(*z)?
            }
            Prop::Element { idx, cells, z } => {
                let i = val(*idx)?;
                i >= 0 && (i as usize) < cells.len() && val(cells[i as usize])? == val(*z)?
            }
            Prop::AllDiff { vars } => {
                let mut seen = Vec::with_capacity(vars.len());
                for &v in vars {
                    seen.push(val(v)?);
                }
                seen.sort_unstable();
                seen.windows(2).all(|w| w[0] != w[1])
            }
        })
    }
}

pub(crate) fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub(crate) fn ceil_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

fn isqrt(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn lo(d: &[Domain], v: usize) -> i128 {
    d[v].lo() as i128
}

fn hi(d: &[Domain], v: usize) -> i128 {
    d[v].hi() as i128
}

fn linear_le(d: &mut [Domain], terms: &[(usize, i128)], c: i128) -> Result<(), Fail> {
    loop {
        let mins: Vec<i128> = terms
            .iter()
            .map(|&(v, a)| if a > 0 { a * lo(d, v) } else { a * hi(d, v) })
            .collect();
        let s: i128 = c + mins.iter().sum::<i128>();
        if s > 0 {
            return Err(Fail);
        }
        let mut changed = false;
        for (k, &(v, a)) in terms.iter().enumerate() {
            let slack = mins[k] - s;
            changed |= if a > 0 {
                d[v].set_hi(floor_div(slack, a))?
            } else {
                d[v].set_lo(ceil_div(slack, a))?
            };
        }
        if !changed {
            return Ok(());
        }
    }
}

pub fn propagate_linear(
    d: &mut [Domain],
    terms: &[(usize, i128)],
    c: i128,
    rel: LinRel,
) -> Result<(), Fail> {
    match rel {
        LinRel::Le => linear_le(d, terms, c),
        LinRel::Eq => {
            let neg: Vec<(usize, i128)> = terms.iter().map(|&(v, a)| (v, -a)).collect();
            loop {
                let before: Vec<(i64, i64)> = terms.iter().map(|t| (d[t.0].lo(), d[t.0].hi())).collect();
                linear_le(d, terms, c)?;
                linear_le(d, &neg, -c)?;
                let after: Vec<(i64, i64)> = terms.iter().map(|t| (d[t.0].lo(), d[t.0].hi())).collect();
                if before == after {
                    break;
                }
            }
            if let [(v, a)] = terms {
                if (-c) % a != 0 {
                    return Err(Fail);
                }
                d[*v].fix((-c / a) as i64)?;
            }
            Ok(())
        }
        LinRel::Ne => {
            let mut rest = c;
            let mut open = None;
            for &(v, a) in terms {
                match d[v].value() {
                    Some(x) => rest += a * x as i128,
                    None if open.is_none() => open = Some((v, a)),
                    None => return Ok(()),
                }
            }
            match open {
                None if rest == 0 => Err(Fail),
                None => Ok(()),
                Some((v, a)) => {
                    if (-rest) % a == 0 {
                        let x = -rest / a;
                        if x >= i64::MIN as i128 && x <= i64::MAX as i128 {
                            d[v].remove(x as i64)?;
                        }
                    }
                    Ok(())
                }
            }
        }
    }
}

fn hull(values: impl IntoIterator<Item = i128>) -> (i128, i128) {
    values
        .into_iter()
        .fold((i128::MAX, i128::MIN), |(l, h), v| (l.min(v), h.max(v)))
}

/// Narrow `x` from `z = x · y` when `y` has a known sign.
fn times_factor(d: &mut [Domain], x: usize, y: usize, z: usize) -> Result<(), Fail> {
    let (ylo, yhi) = (lo(d, y), hi(d, y));
    let (zlo, zhi) = (lo(d, z), hi(d, z));
    if ylo > 0 || yhi < 0 {
        let corners = [(zlo, ylo), (zlo, yhi), (zhi, ylo), (zhi, yhi)];
        let l = corners.iter().map(|&(a, b)| ceil_div(a, b)).min().unwrap();
        let h = corners.iter().map(|&(a, b)| floor_div(a, b)).max().unwrap();
        d[x].set_lo(l)?;
        d[x].set_hi(h)?;
    } else if zlo > 0 || zhi < 0 {
        d[x].remove(0)?;
    }
    Ok(())
}

pub fn propagate_times(d: &mut [Domain], x: usize, y: usize, z: usize) -> Result<(), Fail> {
    for _ in 0..8 {
        let snapshot = (d[x].clone(), d[y].clone(), d[z].clone());
        let (xl, xh, yl, yh) = (lo(d, x), hi(d, x), lo(d, y), hi(d, y));
        let (pl, ph) = hull([xl * yl, xl * yh, xh * yl, xh * yh]);
        d[z].set_lo(pl)?;
        d[z].set_hi(ph)?;
        if x == y {
            d[z].set_lo(0)?;
            let r = isqrt(hi(d, z));
            d[x].set_lo(-r)?;
            d[x].set_hi(r)?;
            let zl = lo(d, z);
            if zl > 0 {
                let mut s = isqrt(zl);
                if s * s < zl {
                    s += 1;
                }
                d[x].remove_range((-s + 1) as i64, (s - 1) as i64, 4096)?;
            }
            if d[x].has_holes() || d[x].size() <= 64 {
                let squares: Vec<i128> = d[x].iter().map(|v| v as i128 * v as i128).collect();
                let (sl, sh) = hull(squares);
                d[z].set_lo(sl)?;
                d[z].set_hi(sh)?;
            }
        } else {
            times_factor(d, x, y, z)?;
            times_factor(d, y, x, z)?;
        }
        if (d[x].clone(), d[y].clone(), d[z].clone()) == snapshot {
            break;
        }
    }
    if let (Some(a), Some(b)) = (d[x].value(), d[y].value()) {
        let p = a as i128 * b as i128;
        if p < i64::MIN as i128 || p > i64::MAX as i128 {
            return Err(Fail);
        }
        d[z].fix(p as i64)?;
    }
    Ok(())
}

pub fn propagate_div(d: &mut [Domain], x: usize, y: usize, z: usize) -> Result<(), Fail> {
    d[y].remove(0)?;
    let (xl, xh) = (lo(d, x), hi(d, x));
    let (yl, yh) = (lo(d, y), hi(d, y));
    let mut parts = Vec::new();
    if yl < 0 {
        parts.push((yl, yh.min(-1)));
    }
    if yh > 0 {
        parts.push((yl.max(1), yh));
    }
    let mut quotients = Vec::new();
    for &(a, b) in &parts {
        for xv in [xl, xh] {
            quotients.push(xv / a);
            quotients.push(xv / b);
        }
    }
    let (ql, qh) = hull(quotients);
    d[z].set_lo(ql)?;
    d[z].set_hi(qh)?;
    let (zl, zh) = (lo(d, z), hi(d, z));
    let mut products = Vec::new();
    let mut max_abs = 0;
    for &(a, b) in &parts {
        max_abs = max_abs.max(a.abs()).max(b.abs());
        for zv in [zl, zh] {
            products.push(zv * a);
            products.push(zv * b);
        }
    }
    let (pl, ph) = hull(products);
    d[x].set_lo(pl - (max_abs - 1))?;
    d[x].set_hi(ph + (max_abs - 1))?;
    if let (Some(a), Some(b)) = (d[x].value(), d[y].value()) {
        d[z].fix(a / b)?;
    }
    Ok(())
}

fn disjoint(a: &Domain, b: &Domain) -> bool {
    if a.hi() < b.lo() || b.hi() < a.lo() {
        return true;
    }
    match (a.value(), b.value()) {
        (Some(v), _) => !b.contains(v),
        (_, Some(v)) => !a.contains(v),
        _ => false,
    }
}

pub fn propagate_element(d: &mut [Domain], idx: usize, cells: &[usize], z: usize) -> Result<(), Fail> {
    d[idx].set_lo(0)?;
    d[idx].set_hi(cells.len() as i128 - 1)?;
    let candidates: Vec<i64> = d[idx].iter().collect();
    for i in candidates {
        if disjoint(&d[cells[i as usize]], &d[z]) {
            d[idx].remove(i)?;
        }
    }
    let (l, h) = hull(d[idx].iter().flat_map(|i| {
        let c = &d[cells[i as usize]];
        [c.lo() as i128, c.hi() as i128]
    }));
    d[z].set_lo(l)?;
    d[z].set_hi(h)?;
    if let Some(i) = d[idx].value() {
        let cell = cells[i as usize];
        if cell != z {
            let zd = d[z].clone();
            d[cell].intersect(&zd)?;
            let cd = d[cell].clone();
            d[z].intersect(&cd)?;
        }
    }
    Ok(())
}

pub fn propagate_alldifferent(d: &mut [Domain], vars: &[usize]) -> Result<(), Fail> {
    loop {
        let mut changed = false;
        for (k, &v) in vars.iter().enumerate() {
            if let Some(x) = d[v].value() {
                for (k2, &w) in vars.iter().enumerate() {
                    if k2 != k {
                        if w == v {
                            return Err(Fail);
                        }
                        changed |= d[w].remove(x)?;
                    }
                }
            }
        }
        // Hall intervals over bounds.
        let bounds: Vec<(i64, i64)> = vars.iter().map(|&v| (d[v].lo(), d[v].hi())).collect();
        for &(a, _) in &bounds {
            for &(_, b) in &bounds {
                if a > b {
                    continue;
                }
                let inside = bounds.iter().filter(|&&(l, h)| l >= a && h <= b).count() as i128;
                let width = b as i128 - a as i128 + 1;
                if inside > width {
                    return Err(Fail);
                }
                if inside == width {
                    for (k, &v) in vars.iter().enumerate() {
                        let (l, h) = bounds[k];
                        if l >= a && h <= b {
                            continue;
                        }
                        let dl = d[v].lo();
                        let dh = d[v].hi();
                        if dl >= a && dl <= b {
                            changed |= d[v].set_lo(b as i128 + 1)?;
                        }
                        if dh >= a && dh <= b {
                            changed |= d[v].set_hi(a as i128 - 1)?;
                        }
                    }
                }
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_helpers() {
        assert_eq!(floor_div(-7, 2), -4);
        assert_eq!(ceil_div(-7, 2), -3);
        assert_eq!(floor_div(7, -2), -4);
        assert_eq!(ceil_div(7, 2), 4);
    }

    #[test]
    fn midpoint_is_folded_by_propagation() {
        // m = (l + u) / 2 with l = 0, u = 7: s = l + u, m = s / 2
        let mut d = vec![
            Domain::singleton(0),
            Domain::singleton(7),
            Domain::wide(),
            Domain::singleton(2),
            Domain::bits(8),
        ];
        propagate_linear(&mut d, &[(0, 1), (1, 1), (2, -1)], 0, LinRel::Eq).unwrap();
        propagate_div(&mut d, 2, 3, 4).unwrap();
        assert_eq!(d[4].value(), Some(3));
    }

    #[test]
    fn square_with_holes() {
        let mut d = vec![Domain::singleton(4), Domain::new(-3, 3)];
        propagate_times(&mut d, 1, 1, 0).unwrap();
        assert_eq!(d[1].iter().collect::<Vec<_>>(), [-2, 2]);
    }

    #[test]
    fn truncating_division() {
        let mut d = vec![Domain::singleton(-3), Domain::singleton(2), Domain::bits(8)];
        propagate_div(&mut d, 0, 1, 2).unwrap();
        assert_eq!(d[2].value(), Some(-1));
    }

    #[test]
    fn element_examples() {
        let mut d = vec![Domain::new(0, 1), Domain::singleton(5), Domain::singleton(7), Domain::singleton(7)];
        propagate_element(&mut d, 0, &[1, 2], 3).unwrap();
        assert_eq!(d[0].value(), Some(1));

        let mut d = vec![Domain::new(0, 1), Domain::new(5, 7), Domain::new(5, 7), Domain::singleton(9)];
        assert_eq!(propagate_element(&mut d, 0, &[1, 2], 3), Err(Fail));
    }

    #[test]
    fn alldifferent_examples() {
        let mut d = vec![Domain::singleton(1), Domain::singleton(1)];
        assert_eq!(propagate_alldifferent(&mut d, &[0, 1]), Err(Fail));
        let mut d = vec![Domain::new(1, 2), Domain::new(1, 2), Domain::new(1, 2)];
        assert_eq!(propagate_alldifferent(&mut d, &[0, 1, 2]), Err(Fail));
        let mut d = vec![Domain::singleton(1), Domain::singleton(2), Domain::singleton(3)];
        let before = d.clone();
        propagate_alldifferent(&mut d, &[0, 1, 2]).unwrap();
        assert_eq!(d, before);
    }

    #[test]
    fn empty_bounds_fail() {
        let mut d = vec![Domain::new(5, 10)];
        assert_eq!(propagate_linear(&mut d, &[(0, 1)], -3, LinRel::Le), Err(Fail));
    }
}
