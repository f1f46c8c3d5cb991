//! Splits a notched ring into 12 equal-area pieces and prints the labels.

use sroi::{subdivide_equal, BinaryMask, GridDims};

fn main() -> sroi::Result<()> {
    let dims = GridDims::new(48, 48)?;
    let mask = BinaryMask::from_fn(dims, |c| {
        let (dx, dy) = (c.x as f64 - 23.5, c.y as f64 - 23.5);
        let r = dx.hypot(dy);
        (12.0..=22.0).contains(&r) && dy.atan2(dx).to_degrees().abs() > 12.0
    });
    let labels = subdivide_equal(&mask, 12)?;
    for row in labels.data().chunks(dims.width()) {
        let line: String = row
            .iter()
            .map(|&l| {
                if l == 0 {
                    '.'
                } else {
                    char::from_digit(l, 36).unwrap()
                }
            })
            .collect();
        println!("{line}");
    }
    println!("areas: {:?}", &labels.areas()[1..]);
    Ok(())
}
