// Generated by tests/tools/make_ml_reference.py -- do not edit by hand.
// mpmath 1.3.0 at 60 significant digits.
#pragma once

#include <complex>

namespace mlref {

struct MLPoint { double a, b; std::complex<double> z, value; };
struct ZeroPoint { double beta; int n; std::complex<double> lambda; bool is_real; };

inline constexpr MLPoint kValues[] = {
    {1.5, 1.5, {-12, 0}, {-0.0423148449013233011260146, 0.0}},
    {1.5, 1.5, {-50, 0}, {-0.00028331106562273091450024, 0.0}},
    {1.5, 1.5, {-200, 0}, {-0.0000105763807447045399665641, 0.0}},
    {1.5, 0.5, {-35, 0}, {-0.012239749118756067426095, 0.0}},
    {1.5, 2.0, {-80, 0}, {0.00705134520188844752790993, 0.0}},
    {1.2, 1.2, {-50, 0}, {-0.0000903744440154898788464681, 0.0}},
    {1.2, 0.2, {-24, 0}, {0.00100640582770861189206398, 0.0}},
    {1.3, 1.3, {-14.142135623730951, 14.142135623730951}, {-0.0339086452626917220774656, 0.00750244455976788636193549}},
    {1.7, 1.7, {-120, 0}, {-0.0010411569629871263164837, 0.0}},
    {1.7, 0.7, {-80, 0}, {0.0553495024736934649819191, 0.0}},
    {1.9, 1.9, {-298.668589380924, 28.232493995554297}, {0.020115027233483662456744, -0.00218143141796257168449215}},
    {1.8, 1.8, {-300, 0}, {-0.0014204674212744370162133, 0.0}},
    {2.0, 1.5, {-90, 0}, {-0.246391054731599567248657, 0.0}},
    {1.5, 1.5, {-36.405764746872634, 26.450336353161291}, {0.0339430422058440432226279, -0.0367802048597905101541885}},
    {1.5, 1.5, {-123.28211884412627, 101.98783835979036}, {-0.0183032403314583019064973, -0.00614060940670660538032389}},
    {1.3, 1.3, {-411.44967660473117, 566.31189606246323}, {0.000000192107270150382717134195, -0.000000582842302187051236726266}},
    {1.7, 1.7, {-2324.4412147206285, 920.31138171169493}, {-0.0000473224500452819041897675, -0.0000806615854970671379655964}},
    {1.5, 1.5, {3, 4}, {0.776439374911233353738262, 4.16469388053473472141951}},
    {1.5, 2.5, {7, 24}, {3.21878819106512872011082, -6.33847594085942625187931}},
    {1.1, 1.1, {-150, 0}, {-0.00000471398489935671579714693, 0.0}},
};

inline constexpr MLPoint kDerivValues[] = {
    {1.5, 1.5, {1, 2}, {0.572799462571686960289571, 0.436443449722503305736781}},
    {1.5, 1.5, {-30, 0}, {0.000727424420915682386642582, 0.0}},
    {1.3, 1.3, {-56.568542494923804, 56.568542494923804}, {-0.0000329963479187381045822459, 0.0000651367135909866247109309}},
    {1.7, 0.7, {-60, 0}, {-0.0109637714174679874424894, 0.0}},
};

inline constexpr ZeroPoint kZeros[] = {
    {1.3, 1, {-4.51835025509291653104987, 0.0}, true},
    {1.3, 2, {-17.9196020910533852886071, 3.92135343740696585323493}, false},
    {1.3, 3, {-32.2738014463399308432965, 17.1435154598811133429094}, false},
    {1.3, 4, {-45.8299227308148341083538, 32.6771798697722175462109}, false},
    {1.3, 5, {-59.4252151452843930955779, 50.0793655474540371777628}, false},
    {1.3, 6, {-73.2057076433668911510861, 68.9988357087802485909802}, false},
    {1.5, 1, {-5.07543002954342172802248, 0.0}, true},
    {1.5, 2, {-17.4720154498218991109804, 0.0}, true},
    {1.5, 3, {-32.1294764992857779564924, 0.0}, true},
    {1.5, 4, {-55.8343920055701446028682, 0.0}, true},
    {1.5, 5, {-64.5864758459465605595611, 0.0}, true},
    {1.5, 6, {-99.717837885402185837806, 21.304247554142518534409}, false},
    {1.5, 7, {-141.981471777343166494565, 45.1545253287614370255805}, false},
    {1.5, 8, {-187.520195857275701619436, 73.6962192256495564755056}, false},
    {1.7, 1, {-6.32230699339165560957688, 0.0}, true},
    {1.7, 2, {-22.5704741290065799318148, 0.0}, true},
    {1.7, 3, {-45.9449138723211989371973, 0.0}, true},
    {1.7, 4, {-76.1290524661408961063707, 0.0}, true},
    {1.7, 5, {-111.767732738268333249348, 0.0}, true},
    {1.7, 6, {-153.696460794611882950751, 0.0}, true},
};

// int_0^1 2 e^(1-tau) tau^(1/2) E_{1.5,1.5}(lambda_1 tau^(3/2)) dtau
inline constexpr std::complex<double> kDuhamelExpOracle = {0.970643628912445773737985, 0.0};
inline constexpr std::complex<double> kLambda1Beta15 = {-5.07543002954342172802248, 0.0};

} // namespace mlref
