// Generated by tests/oracles/closed_forms.py (mpmath, 200 digits). Do not edit.
#pragma once

namespace paircorr::reference {

inline constexpr double r0_half_overlap_origin = -0.3996465448867842916;
inline constexpr double r0_half_overlap_origin_published = 1.4014138204528628336;
inline constexpr double half_overlap_ptilde_over_sigma = 2.354820045030949382;

struct CurvePoint {
    double delta_p, p_tilde, sigma, f;
    double r, r_published, i_cor, i_uncor;
};

inline constexpr CurvePoint curve_points[] = {
    {0.5, 0.3, 0.22, 0.0, -0.029874569170796127091, 0.5442620015756454718, 1.7219014845126357244, 1.7749266535986585458},
    {1.0, 1.0, 1.0, 0.0, -0.054087800910883876557, 0.21457530558542021108, 0.19643405877723373261, 0.20766627068177531729},
    {2.5, 0.66, 0.22, 0.0, 1.2087700227536939545, 19.956226499154658398, 1.1170697027245512634e-7, 5.057428755447749895e-8},
    {1.0, 1.0, 1.0, 1.0, -0.7852137525431785644, -0.72420899911045850153, 0.032634732450031592201, 0.15194051219034480032},
    {0.3, 0.11, 0.22, 1.0, -0.58729420788851724327, -0.56067697113402058437, 0.45248403841658107928, 1.096384027230597155},
    {3.0, 2.0, 0.8, 1.0, 0.54732136024771383896, 6.3818573565010152154, 0.41366932021347950304, 0.26734544668035496912},
    {1.2, 0.5, 0.5, 0.5, -0.011524322833826043546, 0.26922789325899394475, 0.73011345532059657104, 0.73862561536540087288},
    {2.0, 0.022, 0.22, 0.75, -0.2921516121400373848, -0.29037977729966756589, 1.2041583496886195291e-6, 1.7011529168402154144e-6},
    {4.0, 3.0, 1.0, 0.25, 0.53431603106341387437, 13.557185192219732765, 0.28408273903932613627, 0.18515268907307981253},
    {0.05, 0.0022, 0.22, 0.5, -0.36822049634534172032, -0.3682047016603176137, 0.032972074654481692611, 0.052189212318139407345},
    {8.0, 0.4, 0.3, 0.9, -0.22080333165719434639, 0.21525343320435726024, 1.0091532126103316278e-68, 1.2951200301672198107e-68},
    {0.001, 1.5, 1.0, 0.3, -0.33296813745271975667, 0.17067737670450594643, 1.4334839282203273314e-7, 2.149048656755463144e-7},
};

struct LargeZPoint {
    double z, delta_p, f, r, log_shell_full;
};

inline constexpr double large_z_sigma = 1.0;
inline constexpr double large_z_p_tilde = 10.0;
inline constexpr LargeZPoint large_z_points[] = {
    {0.001, 2.0e-4, 0.0, -0.99999999994444821991, -24.999999843333338889},
    {0.001, 2.0e-4, 0.5, -0.99999999997222410764, -24.999999843333338889},
    {0.001, 2.0e-4, 1.0, -0.99999999999999999537, -24.999999843333338889},
    {0.5, 0.1, 0.0, -0.99999999994327634287, -24.961175145387081891},
    {0.5, 0.1, 0.5, -0.9999999999710522306, -24.961175145387081891},
    {0.5, 0.1, 1.0, -0.99999999999882811833, -24.961175145387081891},
    {5.0, 1.0, 0.0, -0.99999999956001210311, -22.552630493954416173},
    {5.0, 1.0, 0.5, -0.99999999958778799084, -22.552630493954416173},
    {5.0, 1.0, 1.0, -0.99999999961556387857, -22.552630493954416173},
    {9.99, 1.998, 0.0, -0.99999996965605430964, -19.00273277532319915},
    {9.99, 1.998, 0.5, -0.99999996968383019733, -19.00273277532319915},
    {9.99, 1.998, 1.0, -0.99999996971160608501, -19.00273277532319915},
    {10.01, 2.002, 0.0, -0.99999996910542245982, -18.988732775907414575},
    {10.01, 2.002, 0.5, -0.9999999691331983475, -18.988732775907414575},
    {10.01, 2.002, 1.0, -0.99999996916097423518, -18.988732775907414575},
    {11.0, 2.2, 0.0, -0.99999992437870707222, -18.301042453637262663},
    {11.0, 2.2, 0.5, -0.99999992440648295977, -18.301042453637262663},
    {11.0, 2.2, 1.0, -0.99999992443425884732, -18.301042453637262663},
    {50.0, 10.0, 0.0, 0.99999999724975815798, -4.605170185988091368},
    {50.0, 10.0, 0.5, 0.99999999722241123086, -4.605170185988091368},
    {50.0, 10.0, 1.0, 0.99999999719506430375, -4.605170185988091368},
    {200.0, 40.0, 0.0, 1.0000000000277758877, -230.99146454710798199},
    {200.0, 40.0, 0.5, 1.0, -230.99146454710798199},
    {200.0, 40.0, 1.0, 0.99999999997222411227, -230.99146454710798199},
    {700.0, 140.0, 0.0, 1.0000000000277758877, -4232.24422751560335},
    {700.0, 140.0, 0.5, 1.0, -4232.24422751560335},
    {700.0, 140.0, 1.0, 0.99999999997222411227, -4232.24422751560335},
};

struct LimitPoint {
    double delta_p, sigma, f, r;
};

inline constexpr LimitPoint small_ptilde_points[] = {
    {0.5, 0.22, 0.5, -0.02288401777986651371},
    {2.0, 0.22, 0.75, -0.2944577669172181894},
    {5.0, 0.22, 1.0, -0.89814525934879503224},
    {0.1, 0.22, 0.25, -0.14784542034830928927},
    {1.0, 0.22, 0.5, 0.33165006173677893713},
};

} // namespace paircorr::reference
