//! The concave envelope of the phase-error entropy: tangent point D, the
//! line through (1/4, h3(1/4, 1/3)), and a point-cloud hull for comparison.

use sixstate::rate::{envelope_oracle, hzx_upper, tangent_at_b, tangent_envelope};

fn main() -> sixstate::Result<()> {
    let env = tangent_envelope()?;
    let b = tangent_at_b()?;
    println!("D  = ({:.6}, {:.6})", env.e_d, env.h_at_d);
    println!("line: {:.6} e + {:.6}   (value {:.6} at e = 1/4)", env.slope, env.intercept, env.v3);
    println!("h meets the line at e = {:.6}", env.neglect_edge);
    println!("B  = ({:.6}, h = {:.6}, 1 - h = {:.6})", b.e_b, b.h_at_b, b.one_minus_h_at_b);
    println!("tangent at B meets h at e = {:.6}", b.e_c);

    let hull = envelope_oracle(1e-4, 0.2916)?;
    let mut gap = 0.0_f64;
    for i in 0..=250 {
        let e = i as f64 * 1e-3;
        gap = gap.max((hull.value_at(e).unwrap_or(f64::NAN) - hzx_upper(e, &env)?).abs());
    }
    println!("hull vertices: {}, max gap to analytic envelope: {gap:.2e}", hull.vertices.len());
    Ok(())
}
