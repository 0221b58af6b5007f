use crate::classifiers::tree::entropy;

/// Equal-frequency discretisation into at most `bins` codes. Positions in
/// sorted order map to `floor(pos * bins / n)`; tied values take the code
/// of their first occurrence, so equal inputs always share a bin.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut codes = vec![0; n];
    let mut prev: Option<(f64, usize)> = None;
    for (pos, &i) in order.iter().enumerate() {
        let code = match prev {
            Some((v, c)) if v == values[i] => c,
            _ => pos * bins / n,
        };
        codes[i] = code;
        prev = Some((values[i], code));
    }
    codes
}

fn counts(codes: &[usize]) -> Vec<usize> {
    let k = codes.iter().max().map_or(0, |m| m + 1);
    let mut c = vec![0; k];
    for &v in codes {
        c[v] += 1;
    }
    c
}

/// `2·I(a;b) / (H(a) + H(b))` in bits; 0 when both are constant.
pub fn symmetric_uncertainty(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let ha = entropy(&counts(a), n);
    let hb = entropy(&counts(b), n);
    if ha + hb <= 0.0 {
        return 0.0;
    }
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let joint: Vec<usize> = a.iter().zip(b).map(|(&x, &y)| x * kb + y).collect();
    let hab = entropy(&counts(&joint), n);
    let su = 2.0 * (ha + hb - hab) / (ha + hb);
    su.clamp(0.0, 1.0)
}
