//! The smoothing kernel family G_n and the partial Fourier identity its
//! two-variable extension satisfies in closed form.

use braidlab::gauss::{
    partial_fourier_closed_form, partial_fourier_quadrature, partial_fourier_residual,
    GaussKernel, PartialFourierParams, QuadratureSpec,
};

fn main() -> braidlab::Result<()> {
    let spec = QuadratureSpec::trapezoid(75, 8.0);

    for n in [1.0, 4.0] {
        let mass: f64 = GaussKernel::new(n)?
            .quadrature(&spec)?
            .iter()
            .map(|(_, w)| w)
            .sum();
        println!("line kernel mass at n={n}: 1 {:+.3e}", mass - 1.0);
    }

    let p = PartialFourierParams {
        n: 2.0,
        r: 0.45,
        t: -1.1,
        q: 0.8,
        q_tilde: -0.3,
    };
    let closed = partial_fourier_closed_form(&p)?;
    let quad = partial_fourier_quadrature(&p, &spec)?;
    println!("closed form:  {closed:.12}");
    println!("quadrature:   {quad:.12}");
    println!("gap:          {:.3e}", (closed - quad).norm());

    // a fast-oscillation parameter set, then one node-doubling step
    let hard = PartialFourierParams {
        n: 8.0,
        r: 1.1,
        t: 0.9,
        q: 1.6,
        q_tilde: -1.4,
    };
    let coarse_spec = QuadratureSpec::trapezoid(25, 8.0);
    let coarse = partial_fourier_residual(&hard, &coarse_spec)?;
    let fine = partial_fourier_residual(&hard, &coarse_spec.refined())?;
    println!("hard params: residual {coarse:.3e} -> {fine:.3e} after one refinement");
    Ok(())
}
