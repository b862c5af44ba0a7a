//! Measurements needed for a target recovered fraction `1 − 3u`.

use cs_ustat::bounds::{rate, RateQuery, RateVariant};

fn main() -> cs_ustat::Result<()> {
    let ns = [200, 500, 1000, 2000, 3000];
    for fraction in [0.9, 0.99] {
        let u = (1.0 - fraction) / 3.0;
        println!("recovered fraction {fraction} (u = {u:.4}), const 1.8");
        print!("{:>4}", "k");
        for n in ns {
            print!(" {:>7}", format!("n={n}"));
        }
        println!();
        for k in [2, 4, 6, 8, 10] {
            print!("{k:>4}");
            for n in ns {
                let r = rate(&RateQuery { k, n, u, constant: 1.8, variant: RateVariant::Full })?;
                print!(" {:>7}", r.m_rounded);
            }
            println!();
        }
        println!();
    }
    Ok(())
}
