use proptest::prelude::*;
use susmap::schedule::{
    default_envelope, parse_envelope_csv, validate_hgain_schedule, AnnealEnvelope, HGainLimits,
    PiecewiseLinearSchedule, ScheduleViolation,
};

/// Anchors with nondecreasing times starting at 0; duplicates allowed.
fn anchors() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0u8..4, -3.0f64..3.0), 2..8).prop_map(|steps| {
        let mut t = 0.0;
        let mut pts: Vec<(f64, f64)> = steps
            .into_iter()
            .enumerate()
            .map(|(i, (dt, v))| {
                if i > 0 {
                    t += f64::from(dt) * 0.5;
                }
                (t, v)
            })
            .collect();
        if pts.last().unwrap().0 == 0.0 {
            pts.last_mut().unwrap().0 = 1.0;
        }
        pts
    })
}

proptest! {
    #[test]
    fn anchor_values_are_hit(pts in anchors()) {
        let s = PiecewiseLinearSchedule::new(pts.clone()).unwrap();
        for (i, &(t, v)) in pts.iter().enumerate() {
            // With repeated times the last anchor at that time wins.
            let last_at_t = pts.iter().rposition(|p| p.0 == t).unwrap();
            if last_at_t == i {
                prop_assert_eq!(s.eval(t).unwrap(), v);
            }
        }
    }

    #[test]
    fn affine_within_segments(pts in anchors(), a in 0.0f64..1.0, b in 0.0f64..1.0, lam in 0.0f64..1.0) {
        let s = PiecewiseLinearSchedule::new(pts.clone()).unwrap();
        for w in pts.windows(2) {
            let (t0, t1) = (w[0].0, w[1].0);
            if t1 <= t0 {
                continue;
            }
            // Stay strictly inside so both times see the same segment.
            let inner = |x: f64| t0 + (t1 - t0) * (1e-9 + x * (1.0 - 2e-9));
            let (x, y) = (inner(a), inner(b));
            let mid = s.eval(lam * x + (1.0 - lam) * y).unwrap();
            let blend = lam * s.eval(x).unwrap() + (1.0 - lam) * s.eval(y).unwrap();
            prop_assert!((mid - blend).abs() < 1e-12, "{} vs {}", mid, blend);
        }
    }

    #[test]
    fn time_scaling_reparameterizes(pts in anchors(), scale in 0.001f64..100.0, u in 0.0f64..1.0) {
        let s = PiecewiseLinearSchedule::new(pts).unwrap();
        let scaled = s.scaled(scale).unwrap();
        let t = u * s.duration();
        let a = s.eval(t).unwrap();
        let b = scaled.eval((t * scale).min(scaled.duration())).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn values_stay_within_anchor_range(pts in anchors(), u in 0.0f64..1.0) {
        let s = PiecewiseLinearSchedule::new(pts.clone()).unwrap();
        let lo = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let v = s.eval(u * s.duration()).unwrap();
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }

    #[test]
    fn magnitude_violations_match_points(pts in anchors()) {
        let s = PiecewiseLinearSchedule::new(pts.clone()).unwrap();
        let limits = HGainLimits { max_points: 100, max_magnitude: 2.0, max_slope: f64::INFINITY };
        let flagged: Vec<usize> = validate_hgain_schedule(&s, &limits)
            .into_iter()
            .filter_map(|v| match v {
                ScheduleViolation::Magnitude { point, .. } => Some(point),
                _ => None,
            })
            .collect();
        let expected: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].1.abs() > 2.0).collect();
        prop_assert_eq!(flagged, expected);
    }

    #[test]
    fn tabulated_envelope_round_trips(samples in 2usize..40) {
        let text = default_envelope().to_csv(samples);
        let back = parse_envelope_csv(&text).unwrap();
        for k in 0..=4 * samples {
            let s = k as f64 / (4 * samples) as f64;
            let (a0, b0) = default_envelope().eval(s);
            let (a1, b1) = back.eval(s);
            // Linear interpolation of a quadratic A is exact at the rows only.
            prop_assert!((b0 - b1).abs() < 1e-12);
            prop_assert!(a1 >= a0 - 1e-12);
            prop_assert!(a1 - a0 <= 6.0 / (4.0 * (samples * samples) as f64) + 1e-12);
        }
    }
}

#[test]
fn ramp_off_at_the_end_is_right_continuous() {
    let s = PiecewiseLinearSchedule::from_pairs(&[[0.0, 0.0], [1.0, 2.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
    assert_eq!(s.eval(1.0).unwrap(), 0.0);
    assert_eq!(s.eval(0.5).unwrap(), 1.0);
}

#[test]
fn steep_step_is_a_slope_violation() {
    let s = PiecewiseLinearSchedule::from_pairs(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
    let v = validate_hgain_schedule(&s, &HGainLimits::default());
    assert!(matches!(v[..], [ScheduleViolation::Slope { segment: 0, .. }]));
}

#[test]
fn envelope_rejects_bad_rows_with_line_numbers() {
    let e = parse_envelope_csv("s,A_GHz,B_GHz\n0,5,0\n0.5,6,1\n1,0,2\n").unwrap_err();
    assert!(e.to_string().contains("line 3"), "{e}");
    assert!(parse_envelope_csv("s,A,B\n0,1,0\n1,0,1\n").is_err());
    assert!(parse_envelope_csv("s,A_GHz,B_GHz\n0,1,0\n1,0.5,1\n").is_err());
    assert!(matches!(
        parse_envelope_csv("s,A_GHz,B_GHz\n0,1,0\n1,0,1\n").unwrap(),
        AnnealEnvelope::Table(_)
    ));
}
