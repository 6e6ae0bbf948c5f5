// Parse, simplify, differentiate and print metric expressions.

use std::error::Error;

use wstar::expr::{differentiate, evaluate, parse, simplify, Point};

pub fn run() -> Result<(), Box<dyn Error>> {
    let coords = ["t", "r"];
    let params = ["M"];
    let e = parse("-(1 - 2*M/r) * t^(4/3)", &coords, &params)?;
    let names = coords.map(String::from);
    println!("g_00 = {}", e.display_with(&names));

    for (k, c) in coords.iter().enumerate() {
        let d = simplify(&differentiate(&e, k));
        println!("d/d{c} g_00 = {}", d.display_with(&names));
    }

    let p = Point::new(vec![2.0, 5.0]).with_param("M", 1.0);
    println!("g_00 at t=2, r=5: {}", evaluate(&e, &p)?);

    // exact rational folding
    let q = simplify(&parse("1/3 + 1/6 - x*0", &["x"], &[] as &[&str])?);
    println!("1/3 + 1/6 - x*0 = {q}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
