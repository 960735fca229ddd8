//! Named country groups usable as region filters.

/// The 35 countries of the American continent network, as
/// `(ISO 3166-1 alpha-3 code, display name)`.
pub const AMERICAS: [(&str, &str); 35] = [
    ("ATG", "Antigua and Barbuda"),
    ("ARG", "Argentina"),
    ("BHS", "Bahamas"),
    ("BRB", "Barbados"),
    ("BLZ", "Belize"),
    ("BOL", "Bolivia"),
    ("BRA", "Brazil"),
    ("CAN", "Canada"),
    ("CHL", "Chile"),
    ("COL", "Colombia"),
    ("CRI", "Costa Rica"),
    ("CUB", "Cuba"),
    ("DMA", "Dominica"),
    ("DOM", "Dominican Republic"),
    ("ECU", "Ecuador"),
    ("SLV", "El Salvador"),
    ("GRD", "Grenada"),
    ("GTM", "Guatemala"),
    ("GUY", "Guyana"),
    ("HTI", "Haiti"),
    ("HND", "Honduras"),
    ("JAM", "Jamaica"),
    ("MEX", "Mexico"),
    ("NIC", "Nicaragua"),
    ("PAN", "Panama"),
    ("PRY", "Paraguay"),
    ("PER", "Peru"),
    ("KNA", "Saint Kitts and Nevis"),
    ("LCA", "Saint Lucia"),
    ("VCT", "Saint Vincent and the Grenadines"),
    ("SUR", "Suriname"),
    ("TTO", "Trinidad and Tobago"),
    ("USA", "United States"),
    ("URY", "Uruguay"),
    ("VEN", "Venezuela"),
];

pub fn americas_codes() -> Vec<String> {
    AMERICAS.iter().map(|(c, _)| c.to_string()).collect()
}

/// Resolves a `--region` argument: a preset name or a comma-separated code
/// list.
pub fn parse_region(spec: &str) -> Vec<String> {
    match spec.trim().to_ascii_lowercase().as_str() {
        "americas" | "america" => americas_codes(),
        _ => spec
            .split(',')
            .map(|s| s.trim().to_ascii_uppercase())
            .filter(|s| !s.is_empty())
            .collect(),
    }
}
