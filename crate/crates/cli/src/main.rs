fn main() {
    println!("faultflow");
}
