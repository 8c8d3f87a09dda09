"""Published reference figures for the standard and synthetic benchmark networks.

`NETWORKS` describes each network (nodes, arcs, average degree, maximum in-degree).
`PUBLISHED` holds mean (std) over 10 replicates of missing fraction, extra fraction and
seconds per network, sample size and algorithm. Synthetic networks are keyed by their
`(nodes, max in-degree, max states, strength)` tuple. Gobnilp and PC are external systems;
their rows are kept for comparison only.
"""

from __future__ import annotations

import re

from typing import (
    Dict,
    NamedTuple,
    Optional,
    Tuple,
)

from mecip.commons import public


class NetworkInfo(NamedTuple):
    name: str
    nodes: int
    arcs: int
    avg_degree: float
    max_in_degree: int
    application: str


class PublishedResult(NamedTuple):
    missing: Tuple[float, float]
    extra: Tuple[float, float]
    seconds: Tuple[float, float]


NETWORKS: Dict[str, NetworkInfo] = {
    info.name: info for info in [
        NetworkInfo("asia", 8, 8, 2.00, 2, "educational purposes, small-scale health studies"),
        NetworkInfo("sachs", 11, 17, 3.09, 3, "bioinformatics, cellular signaling pathways"),
        NetworkInfo("child", 20, 25, 2.50, 2, "child health, diseases and symptoms"),
        NetworkInfo("insurance", 27, 52, 3.85, 3, "risk assessment in the insurance industry"),
        NetworkInfo("water", 32, 66, 4.12, 5, "water resource management"),
        NetworkInfo("alarm", 37, 46, 2.49, 4, "patient monitoring and diagnosis"),
        NetworkInfo("barley", 48, 84, 3.50, 4, "agricultural research, barley yield"),
        NetworkInfo("win95pts", 76, 112, 2.95, 7, "failure points in the Windows 95 OS"),
    ]
}


# network  n      algorithm missing         extra            seconds
_PUBLISHED_TABLE = """
alarm     1000   mecip    0.242 (0.029)    0.188 (0.067)    12.118 (3.898)
alarm     1000   gobnilp  0.202 (0.044)    0.188 (0.056)    4.285 (0.668)
alarm     1000   hc       0.468 (0.029)    0.496 (0.051)    6.164 (0.166)
alarm     1000   pc       0.376 (0.035)    0.188 (0.053)    17.686 (1.628)
alarm     10000  mecip    0.108 (0.041)    0.068 (0.047)    184.237 (75.247)
alarm     10000  gobnilp  0.082 (0.006)    0.046 (0.013)    143.675 (58.195)
alarm     10000  hc       0.388 (0.089)    0.526 (0.087)    22.427 (0.432)
alarm     10000  pc       0.166 (0.033)    0.094 (0.033)    59.433 (3.138)
asia      1000   mecip    0.282 (0.151)    0.027 (0.044)    0.215 (0.047)
asia      1000   gobnilp  0.273 (0.129)    0.036 (0.047)    0.284 (0.057)
asia      1000   hc       0.482 (0.182)    0.409 (0.279)    0.194 (0.031)
asia      1000   pc       0.527 (0.112)    0.255 (0.165)    0.359 (0.047)
asia      10000  mecip    0.127 (0.088)    0.000 (0.000)    0.499 (0.288)
asia      10000  gobnilp  0.127 (0.088)    0.000 (0.000)    1.014 (0.234)
asia      10000  hc       0.373 (0.194)    0.400 (0.288)    0.612 (0.056)
asia      10000  pc       0.200 (0.084)    0.082 (0.100)    1.383 (0.049)
barley    1000   mecip    0.727 (0.026)    0.270 (0.030)    6.419 (2.231)
barley    1000   gobnilp  0.685 (0.007)    0.277 (0.025)    2.334 (0.171)
barley    1000   hc       0.704 (0.026)    0.338 (0.052)    8.342 (0.416)
barley    1000   pc       0.698 (0.027)    0.198 (0.022)    60.713 (7.035)
barley    10000  mecip    0.560 (0.050)    0.168 (0.016)    341.102 (129.165)
barley    10000  gobnilp  0.528 (0.006)    0.180 (0.016)    18.534 (5.718)
barley    10000  hc       0.649 (0.062)    0.370 (0.051)    35.437 (1.145)
barley    10000  pc       0.502 (0.023)    0.120 (0.044)    759.509 (92.541)
child     1000   mecip    0.194 (0.050)    0.214 (0.020)    3.900 (1.815)
child     1000   gobnilp  0.117 (0.065)    0.149 (0.071)    1.092 (0.232)
child     1000   hc       0.371 (0.122)    0.249 (0.113)    1.440 (0.064)
child     1000   pc       0.483 (0.068)    0.146 (0.039)    17.075 (3.763)
child     10000  mecip    0.297 (0.130)    0.120 (0.050)    142.757 (73.869)
child     10000  gobnilp  0.040 (0.090)    0.020 (0.033)    4.872 (1.291)
child     10000  hc       0.254 (0.143)    0.180 (0.089)    5.718 (0.309)
child     10000  pc       0.409 (0.024)    0.126 (0.024)    93.186 (2.445)
insurance 1000   mecip    0.496 (0.048)    0.222 (0.080)    8.082 (3.203)
insurance 1000   gobnilp  0.502 (0.014)    0.209 (0.015)    2.340 (0.467)
insurance 1000   hc       0.570 (0.056)    0.363 (0.068)    3.057 (0.236)
insurance 1000   pc       0.693 (0.033)    0.243 (0.027)    20.137 (2.407)
insurance 10000  mecip    0.398 (0.102)    0.185 (0.089)    384.331 (118.207)
insurance 10000  gobnilp  0.248 (0.037)    0.139 (0.029)    18.471 (6.636)
insurance 10000  hc       0.500 (0.048)    0.411 (0.063)    13.118 (0.553)
insurance 10000  pc       0.563 (0.049)    0.213 (0.065)    173.999 (18.602)
sachs     1000   mecip    0.316 (0.134)    0.211 (0.089)    2.402 (0.971)
sachs     1000   gobnilp  0.332 (0.151)    0.226 (0.114)    0.447 (0.059)
sachs     1000   hc       0.447 (0.122)    0.353 (0.122)    0.420 (0.027)
sachs     1000   pc       0.495 (0.044)    0.389 (0.106)    12.267 (3.656)
sachs     10000  mecip    0.221 (0.095)    0.247 (0.117)    6.476 (0.720)
sachs     10000  gobnilp  0.268 (0.072)    0.216 (0.072)    1.023 (0.140)
sachs     10000  hc       0.353 (0.079)    0.379 (0.092)    1.701 (0.082)
sachs     10000  pc       0.326 (0.022)    0.284 (0.044)    33.443 (0.877)
water     1000   mecip    0.644 (0.013)    0.246 (0.030)    1.829 (0.281)
water     1000   gobnilp  0.618 (0.029)    0.218 (0.048)    1.299 (0.420)
water     1000   hc       0.651 (0.040)    0.244 (0.044)    3.259 (0.146)
water     1000   pc       0.688 (0.019)    0.175 (0.015)    2.187 (0.161)
water     10000  mecip    0.665 (0.048)    0.200 (0.069)    309.992 (156.162)
water     10000  gobnilp  0.599 (0.020)    0.143 (0.036)    13.342 (4.825)
water     10000  hc       0.711 (0.039)    0.353 (0.028)    13.566 (0.627)
water     10000  pc       0.638 (0.019)    0.132 (0.012)    18.503 (1.281)
win95pts  1000   mecip    0.478 (0.023)    0.242 (0.049)    137.478 (112.893)
win95pts  1000   gobnilp  0.582 (0.031)    0.508 (0.037)    328.136 (292.290)
win95pts  1000   hc       0.576 (0.039)    0.541 (0.064)    34.998 (1.083)
win95pts  1000   pc       0.634 (0.030)    0.248 (0.024)    23.778 (2.786)
win95pts  10000  mecip    0.356 (0.063)    0.189 (0.052)    1293.529 (927.761)
win95pts  10000  gobnilp  0.514 (0.022)    0.516 (0.027)    2387.577 (1786.621)
win95pts  10000  hc       0.483 (0.070)    0.668 (0.155)    113.818 (15.914)
win95pts  10000  pc       0.439 (0.032)    0.148 (0.021)    159.991 (13.913)
"""


# tuple (nodes,max in-degree,max states,strength)  n  algorithm  missing  extra  seconds
_SYNTHETIC_TABLE = """
20,2,2,1  1000   mecip    0.207 (0.040)    0.293 (0.128)    0.391 (0.082)
20,2,2,1  1000   gobnilp  0.190 (0.059)    0.307 (0.113)    0.276 (0.085)
20,2,2,1  1000   hc       0.317 (0.099)    0.407 (0.051)    1.287 (0.047)
20,2,2,1  1000   pc       0.693 (0.055)    0.169 (0.030)    1.305 (0.064)
20,2,2,1  10000  mecip    0.138 (0.023)    0.038 (0.047)    0.473 (0.081)
20,2,2,1  10000  gobnilp  0.045 (0.049)    0.034 (0.049)    1.113 (0.261)
20,2,2,1  10000  hc       0.338 (0.100)    0.359 (0.103)    1.622 (0.075)
20,2,2,1  10000  pc       0.431 (0.024)    0.231 (0.037)    2.936 (0.258)
20,2,2,5  1000   mecip    0.293 (0.081)    0.293 (0.117)    0.432 (0.098)
20,2,2,5  1000   gobnilp  0.307 (0.073)    0.227 (0.062)    0.146 (0.013)
20,2,2,5  1000   hc       0.380 (0.125)    0.353 (0.148)    1.269 (0.059)
20,2,2,5  1000   pc       0.663 (0.037)    0.130 (0.037)    0.671 (0.062)
20,2,2,5  10000  mecip    0.117 (0.032)    0.080 (0.032)    0.542 (0.126)
20,2,2,5  10000  gobnilp  0.070 (0.055)    0.027 (0.034)    0.306 (0.034)
20,2,2,5  10000  hc       0.273 (0.100)    0.290 (0.121)    1.931 (0.183)
20,2,2,5  10000  pc       0.730 (0.058)    0.077 (0.042)    1.991 (0.164)
20,2,4,1  1000   mecip    0.313 (0.023)    0.103 (0.055)    0.308 (0.061)
20,2,4,1  1000   gobnilp  0.290 (0.022)    0.087 (0.061)    0.116 (0.017)
20,2,4,1  1000   hc       0.290 (0.022)    0.083 (0.065)    1.011 (0.046)
20,2,4,1  1000   pc       0.443 (0.050)    0.140 (0.031)    0.947 (0.147)
20,2,4,1  10000  mecip    0.097 (0.011)    0.070 (0.011)    0.503 (0.014)
20,2,4,1  10000  gobnilp  0.240 (0.014)    0.073 (0.014)    0.510 (0.034)
20,2,4,1  10000  hc       0.117 (0.061)    0.167 (0.099)    1.564 (0.048)
20,2,4,1  10000  pc       0.400 (0.068)    0.150 (0.018)    5.985 (0.524)
20,2,4,5  1000   mecip    0.417 (0.050)    0.245 (0.038)    0.300 (0.025)
20,2,4,5  1000   gobnilp  0.417 (0.050)    0.245 (0.038)    0.065 (0.008)
20,2,4,5  1000   hc       0.428 (0.044)    0.228 (0.029)    0.919 (0.028)
20,2,4,5  1000   pc       0.631 (0.052)    0.166 (0.036)    0.608 (0.077)
20,2,4,5  10000  mecip    0.100 (0.011)    0.134 (0.011)    0.549 (0.016)
20,2,4,5  10000  gobnilp  0.100 (0.011)    0.134 (0.011)    0.343 (0.069)
20,2,4,5  10000  hc       0.290 (0.080)    0.328 (0.085)    1.506 (0.067)
20,2,4,5  10000  pc       0.641 (0.071)    0.128 (0.037)    4.931 (0.870)
20,3,2,1  1000   mecip    0.505 (0.069)    0.284 (0.104)    1.325 (0.262)
20,3,2,1  1000   gobnilp  0.508 (0.074)    0.195 (0.074)    4.299 (2.736)
20,3,2,1  1000   hc       0.457 (0.041)    0.254 (0.083)    1.477 (0.064)
20,3,2,1  1000   pc       0.841 (0.037)    0.227 (0.034)    3.467 (0.797)
20,3,2,1  10000  mecip    0.281 (0.056)    0.259 (0.081)    3.716 (0.984)
20,3,2,1  10000  gobnilp  0.408 (0.068)    0.181 (0.042)    11.493 (5.174)
20,3,2,1  10000  hc       0.276 (0.079)    0.324 (0.093)    2.320 (0.110)
20,3,2,1  10000  pc       0.716 (0.041)    0.365 (0.032)    57.191 (8.868)
20,3,2,5  1000   mecip    0.557 (0.065)    0.154 (0.063)    0.217 (0.026)
20,3,2,5  1000   gobnilp  0.577 (0.066)    0.174 (0.076)    0.119 (0.006)
20,3,2,5  1000   hc       0.571 (0.069)    0.169 (0.041)    0.983 (0.071)
20,3,2,5  1000   pc       0.686 (0.019)    0.074 (0.024)    0.391 (0.033)
20,3,2,5  10000  mecip    0.340 (0.084)    0.146 (0.076)    0.610 (0.113)
20,3,2,5  10000  gobnilp  0.443 (0.041)    0.260 (0.021)    0.751 (1.013)
20,3,2,5  10000  hc       0.403 (0.067)    0.240 (0.092)    1.718 (0.074)
20,3,2,5  10000  pc       0.680 (0.040)    0.046 (0.031)    1.934 (0.640)
20,3,4,1  1000   mecip    0.583 (0.063)    0.179 (0.041)    0.624 (0.180)
20,3,4,1  1000   gobnilp  0.579 (0.087)    0.207 (0.056)    0.219 (0.051)
20,3,4,1  1000   hc       0.462 (0.067)    0.183 (0.048)    1.383 (0.112)
20,3,4,1  1000   pc       0.788 (0.035)    0.171 (0.037)    2.149 (0.436)
20,3,4,1  10000  mecip    0.433 (0.052)    0.348 (0.039)    2.001 (0.670)
20,3,4,1  10000  gobnilp  0.519 (0.031)    0.314 (0.025)    1.691 (0.354)
20,3,4,1  10000  hc       0.267 (0.082)    0.224 (0.067)    2.297 (0.129)
20,3,4,1  10000  pc       0.810 (0.039)    0.257 (0.035)    30.812 (5.640)
20,3,4,5  1000   mecip    0.821 (0.027)    0.077 (0.027)    0.239 (0.022)
20,3,4,5  1000   gobnilp  0.791 (0.045)    0.070 (0.033)    0.068 (0.005)
20,3,4,5  1000   hc       0.828 (0.037)    0.079 (0.025)    0.755 (0.028)
20,3,4,5  1000   pc       0.870 (0.052)    0.133 (0.033)    0.548 (0.077)
20,3,4,5  10000  mecip    0.428 (0.011)    0.100 (0.011)    0.839 (0.016)
20,3,4,5  10000  gobnilp  0.451 (0.011)    0.160 (0.011)    1.520 (0.069)
20,3,4,5  10000  hc       0.444 (0.080)    0.244 (0.085)    2.006 (0.067)
20,3,4,5  10000  pc       0.909 (0.071)    0.086 (0.037)    10.051 (0.870)
60,2,2,1  1000   mecip    0.355 (0.078)    0.299 (0.120)    3.287 (1.034)
60,2,2,1  1000   gobnilp  0.331 (0.036)    0.231 (0.072)    3.228 (2.184)
60,2,2,1  1000   hc       0.428 (0.071)    0.385 (0.063)    19.035 (6.980)
60,2,2,1  1000   pc       0.605 (0.029)    0.256 (0.032)    7.962 (1.989)
60,2,2,1  10000  mecip    0.214 (0.058)    0.177 (0.114)    5.121 (1.708)
60,2,2,1  10000  gobnilp  0.136 (0.036)    0.106 (0.043)    37.128 (13.808)
60,2,2,1  10000  hc       0.330 (0.050)    0.347 (0.052)    26.897 (9.965)
60,2,2,1  10000  pc       0.502 (0.030)    0.266 (0.034)    75.548 (21.849)
60,2,2,5  1000   mecip    0.491 (0.069)    0.452 (0.078)    2.663 (0.916)
60,2,2,5  1000   gobnilp  0.485 (0.048)    0.380 (0.102)    1.547 (0.477)
60,2,2,5  1000   hc       0.488 (0.057)    0.442 (0.098)    17.884 (6.165)
60,2,2,5  1000   pc       0.736 (0.024)    0.194 (0.019)    4.220 (1.107)
60,2,2,5  10000  mecip    0.249 (0.089)    0.228 (0.113)    4.393 (1.503)
60,2,2,5  10000  gobnilp  0.170 (0.032)    0.132 (0.048)    5.174 (1.937)
60,2,2,5  10000  hc       0.288 (0.035)    0.268 (0.056)    25.784 (9.774)
60,2,2,5  10000  pc       0.599 (0.026)    0.177 (0.018)    10.370 (3.236)
60,2,4,1  1000   mecip    0.238 (0.040)    0.169 (0.038)    3.120 (0.663)
60,2,4,1  1000   gobnilp  0.163 (0.041)    0.132 (0.036)    1.323 (0.092)
60,2,4,1  1000   hc       0.368 (0.038)    0.263 (0.033)    14.279 (0.680)
60,2,4,1  1000   pc       0.729 (0.028)    0.238 (0.012)    11.756 (1.410)
60,2,4,1  10000  mecip    0.103 (0.017)    0.141 (0.040)    48.842 (20.701)
60,2,4,1  10000  gobnilp  0.046 (0.055)    0.081 (0.056)    13.694 (5.183)
60,2,4,1  10000  hc       0.236 (0.024)    0.201 (0.035)    20.015 (0.939)
60,2,4,1  10000  pc       0.641 (0.025)    0.248 (0.021)    83.739 (5.294)
60,2,4,5  1000   mecip    0.378 (0.041)    0.152 (0.022)    1.686 (0.110)
60,2,4,5  1000   gobnilp  0.427 (0.076)    0.158 (0.025)    0.981 (0.100)
60,2,4,5  1000   hc       0.446 (0.056)    0.144 (0.027)    9.350 (0.373)
60,2,4,5  1000   pc       0.664 (0.026)    0.122 (0.011)    3.719 (0.194)
60,2,4,5  10000  mecip    0.085 (0.088)    0.049 (0.053)    2.493 (0.385)
60,2,4,5  10000  gobnilp  0.204 (0.029)    0.025 (0.015)    2.994 (0.109)
60,2,4,5  10000  hc       0.184 (0.047)    0.145 (0.052)    16.411 (0.649)
60,2,4,5  10000  pc       0.563 (0.031)    0.143 (0.008)    10.805 (0.316)
60,3,2,1  1000   mecip    0.439 (0.056)    0.248 (0.044)    2.639 (0.459)
60,3,2,1  1000   gobnilp  0.455 (0.029)    0.296 (0.036)    2.069 (0.549)
60,3,2,1  1000   hc       0.415 (0.043)    0.329 (0.050)    14.634 (0.529)
60,3,2,1  1000   pc       0.637 (0.020)    0.187 (0.018)    4.149 (0.213)
60,3,2,1  10000  mecip    0.267 (0.069)    0.220 (0.086)    180.383 (236.930)
60,3,2,1  10000  gobnilp  0.348 (0.007)    0.249 (0.011)    31.884 (16.343)
60,3,2,1  10000  hc       0.264 (0.051)    0.283 (0.042)    20.956 (1.145)
60,3,2,1  10000  pc       0.581 (0.037)    0.193 (0.017)    16.059 (0.986)
60,3,2,5  1000   mecip    0.599 (0.052)    0.358 (0.107)    1.910 (0.132)
60,3,2,5  1000   gobnilp  0.560 (0.043)    0.314 (0.072)    1.327 (0.228)
60,3,2,5  1000   hc       0.583 (0.052)    0.392 (0.070)    12.119 (0.561)
60,3,2,5  1000   pc       0.812 (0.027)    0.211 (0.020)    3.392 (0.266)
60,3,2,5  10000  mecip    0.392 (0.081)    0.331 (0.131)    136.043 (140.459)
60,3,2,5  10000  gobnilp  0.366 (0.019)    0.319 (0.025)    21.135 (11.511)
60,3,2,5  10000  hc       0.246 (0.042)    0.300 (0.043)    21.303 (0.832)
60,3,2,5  10000  pc       0.789 (0.022)    0.220 (0.021)    11.352 (1.317)
60,3,4,1  1000   mecip    0.448 (0.031)    0.207 (0.074)    2.522 (0.360)
60,3,4,1  1000   gobnilp  0.502 (0.046)    0.182 (0.038)    1.016 (0.064)
60,3,4,1  1000   hc       0.524 (0.036)    0.316 (0.054)    12.278 (0.578)
60,3,4,1  1000   pc       0.745 (0.017)    0.172 (0.014)    7.416 (0.989)
60,3,4,1  10000  mecip    0.228 (0.098)    0.139 (0.106)    242.869 (513.812)
60,3,4,1  10000  gobnilp  0.267 (0.018)    0.189 (0.014)    6.633 (1.918)
60,3,4,1  10000  hc       0.299 (0.045)    0.290 (0.049)    20.677 (0.642)
60,3,4,1  10000  pc       0.720 (0.022)    0.162 (0.018)    48.690 (7.089)
60,3,4,5  1000   mecip    0.693 (0.031)    0.191 (0.064)    1.919 (0.229)
60,3,4,5  1000   gobnilp  0.682 (0.025)    0.197 (0.053)    1.044 (0.129)
60,3,4,5  1000   hc       0.706 (0.017)    0.221 (0.036)    9.105 (0.599)
60,3,4,5  1000   pc       0.864 (0.015)    0.158 (0.031)    4.312 (0.319)
60,3,4,5  10000  mecip    0.424 (0.030)    0.227 (0.048)    142.870 (168.419)
60,3,4,5  10000  gobnilp  0.374 (0.015)    0.114 (0.023)    3.811 (0.325)
60,3,4,5  10000  hc       0.382 (0.032)    0.238 (0.046)    19.885 (1.077)
60,3,4,5  10000  pc       0.868 (0.014)    0.167 (0.018)    96.092 (18.335)
"""


_CELL_RE = re.compile(r"([\d.]+) \(([\d.]+)\)")
_TUPLE_RE = re.compile(r"^\(?\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)?$")


@public()
def network_key(name: str) -> str:
    """Catalog key of a network name, BIF path or synthetic tuple.

    'data/ALARM.bif' -> 'alarm', '20,2,2,1' -> '(20, 2, 2, 1)'.
    """
    tuple_match = _TUPLE_RE.match(name.strip())
    if tuple_match:
        return "({}, {}, {}, {})".format(*(int(g) for g in tuple_match.groups()))
    stem = re.split(r"[\\/]", name)[-1]
    stem = stem.rsplit(".", 1)[0] if stem.lower().endswith(".bif") else stem
    return stem.lower()


def _parse_published(text: str) -> Dict[Tuple[str, int, str], PublishedResult]:
    table = {}
    for line in text.strip().splitlines():
        network, n, algorithm, rest = line.split(None, 3)
        cells = [(float(m), float(s)) for m, s in _CELL_RE.findall(rest)]
        table[(network_key(network), int(n), algorithm)] = PublishedResult(*cells)
    return table


PUBLISHED: Dict[Tuple[str, int, str], PublishedResult] = {
    **_parse_published(_PUBLISHED_TABLE),
    **_parse_published(_SYNTHETIC_TABLE),
}


@public()
def published(network: str, n: int, algorithm: str) -> Optional[PublishedResult]:
    return PUBLISHED.get((network_key(network), int(n), algorithm.lower()))
