"""Regenerate data/fixture.json, the offline sampling fixture.

Sites are grouped into eight service clusters. Similarity lists point
mostly inside a cluster, with a few above-threshold bridges so that the
bundled seed sites reach every cluster within a handful of waves. Referral lists
carry visit volumes: heavy inside a cluster, lighter across the cluster pairs
in AFFINITY, plus some traffic to search/social/shopping sites that the
blocklist later removes.

    python scripts/make_fixture.py > data/fixture.json
"""

import json
import random
import sys

CLUSTERS = {
    "ticket": ["alibaba.ir", "flightio.com", "respina24.ir", "eligasht.com", "mrbilit.com",
               "safarmarket.com", "flytoday.ir", "ghasedak24.com"],
    "hotels": ["snapptrip.com", "hotelyar.com", "iranhotelonline.com", "eghamat24.com", "pintapin.com"],
    "taxi": ["snapp.taxi", "alopeyk.com", "snapp.ir", "tapsi.ir"],
    "suites": ["jajiga.com", "otaghak.com", "jabama.com", "shab.ir"],
    "food": ["snappfood.ir", "okala.com", "snapp.market", "ashmazi.com", "irancook.com", "parsiday.com"],
    "location": ["avval.ir", "hamgardi.com", "kojaro.com", "nashan.org", "balad.ir", "cafeyab.com", "fidilio.com"],
    "international": ["lastsecond.ir", "lahzeakhar.com", "hamimohajer.com", "apply.ir"],
    "bus": ["payaneha.com", "payaneh.ir", "bazargah.com", "safar724.com"],
}

# above-threshold similarity links between clusters (source site -> target site)
BRIDGES = [
    ("alibaba.ir", "snapptrip.com", 62),
    ("mrbilit.com", "safar724.com", 71),
    ("snapptrip.com", "jajiga.com", 55),
    ("lastsecond.ir", "eligasht.com", 58),
    ("hamgardi.com", "kojaro.com", 50),
]

# cluster -> [(other cluster, relative referral volume)]
AFFINITY = {
    "ticket": [("international", 5), ("hotels", 4), ("bus", 3), ("suites", 1), ("location", 1)],
    "hotels": [("ticket", 5)],
    "taxi": [],
    "suites": [("ticket", 1)],
    "food": [],
    "location": [("international", 1), ("bus", 1)],
    "international": [("ticket", 5), ("location", 1)],
    "bus": [("ticket", 3)],
}

NOISE_IN = ["google.com", "instagram.com", "telegram.org"]
NOISE_OUT = ["digikala.com", "twitter.com", "aparat.com", "divar.ir"]


def build(rng):
    cluster_of = {s: c for c, sites in CLUSTERS.items() for s in sites}
    sites = {}
    for cluster, members in CLUSTERS.items():
        for site in members:
            peers = [m for m in members if m != site]
            rng.shuffle(peers)
            similar = [{"domain": p, "score": rng.randint(52, 96)} for p in peers[:4]]
            # one low-score cross-cluster candidate, dropped by the threshold
            stranger = rng.choice([s for s in cluster_of if cluster_of[s] != cluster])
            similar.append({"domain": stranger, "score": rng.randint(20, 49)})
            for src, dst, score in BRIDGES:
                if src == site:
                    similar.insert(0, {"domain": dst, "score": score})

            out_refs = [{"domain": p, "weight": rng.randint(40, 90)} for p in peers[:3]]
            in_refs = [{"domain": p, "weight": rng.randint(40, 90)} for p in peers[1:3]]
            for other, volume in AFFINITY[cluster]:
                if rng.random() < 0.5 + 0.1 * volume:
                    target = rng.choice(CLUSTERS[other])
                    out_refs.append({"domain": target, "weight": 8 * volume})
            in_refs.insert(0, {"domain": rng.choice(NOISE_IN), "weight": rng.randint(50, 120)})
            if rng.random() < 0.6:
                out_refs.append({"domain": rng.choice(NOISE_OUT), "weight": rng.randint(10, 30)})
            sites[site] = {
                "similar": similar,
                "referrals_in": in_refs[:5],
                "referrals_out": out_refs[:5],
            }
    # a site with more than five similar entries exercises top-5 truncation
    sites["alibaba.ir"]["similar"] += [
        {"domain": "safarmarket.com", "score": 51},
        {"domain": "ghasedak24.com", "score": 49},
    ]
    return {"sites": sites}


if __name__ == "__main__":
    json.dump(build(random.Random(20231)), sys.stdout, indent=2)
    sys.stdout.write("\n")
