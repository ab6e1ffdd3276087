"""Values transcribed from the published inter-community tables."""

COMMUNITIES = [
    "Ticket and Tour Booking",
    "Accommodation (Hotels)",
    "Location Services",
    "Online Taxi Services",
    "International Tours and Migration",
    "Accommodation (Suite and Cottage)",
    "Food and Cooking",
    "Bus Ticketing",
]
TTB, HOTELS, LOCATION, TAXI, INTL, SUITE, FOOD, BUS = range(8)

# (source, target) -> mean weight, with the pairing of the strong/weak table
PUBLISHED_MATRIX = {
    (TTB, INTL): 45.1,
    (TTB, HOTELS): 25.6,
    (TTB, BUS): 15.2,
    (TTB, LOCATION): 1.5,
    (TTB, SUITE): 4.2,
    (HOTELS, TTB): 34.7,
    (SUITE, TTB): 4.8,
    (LOCATION, INTL): 1.2,
    (LOCATION, BUS): 2.4,
    (INTL, TTB): 30.2,
    (INTL, LOCATION): 1.2,
    (BUS, TTB): 11.6,
}

STRONG = {(TTB, INTL), (TTB, HOTELS), (TTB, BUS), (HOTELS, TTB), (INTL, TTB), (BUS, TTB)}
WEAK = set(PUBLISHED_MATRIX) - STRONG
NO_CONNECTIONS = {TAXI, FOOD}

PUBLISHED_SHARES = [31.96, 13, 11.34, 11, 8, 8, 7, 6]

SEED_SITES = [
    "Snappfood.ir", "Okala.com", "Alibaba.ir", "Alopeyk.com", "Avval.ir", "Snapp.taxi",
    "Hamgardi.com", "Snapp.market", "Kojaro.com", "Lastsecond.ir", "Flightio.com",
]
