//! Conical-product Gauss quadrature tables on the reference tetrahedron.
//! All weights positive; weights sum to 1/6 per rule.

pub(super) const PTS_DEG1: [[f64; 3]; 1] = [
    [0.25, 0.25, 0.25],
];
pub(super) const WTS_DEG1: [f64; 1] = [
    0.16666666666666666,
];

pub(super) const PTS_DEG2: [[f64; 3]; 8] = [
    [0.1225148226554415, 0.13605497680284598, 0.15668263733681828],
    [0.1225148226554415, 0.13605497680284598, 0.5847475632048942],
    [0.1225148226554415, 0.5659331650728008, 0.06583868706004439],
    [0.1225148226554415, 0.5659331650728008, 0.2457133252117132],
    [0.5441518440112253, 0.0706797241593969, 0.08139566701467026],
    [0.5441518440112253, 0.0706797241593969, 0.30377276481470755],
    [0.5441518440112253, 0.29399880063162287, 0.03420279323676641],
    [0.5441518440112253, 0.29399880063162287, 0.12764656212038542],
];
pub(super) const WTS_DEG2: [f64; 8] = [
    0.03697985635885293,
    0.03697985635885293,
    0.02115700645452407,
    0.02115700645452407,
    0.016027040598476597,
    0.016027040598476597,
    0.009169429921479734,
    0.009169429921479734,
];

pub(super) const PTS_DEG3: [[f64; 3]; 8] = [
    [0.1225148226554415, 0.13605497680284598, 0.15668263733681828],
    [0.1225148226554415, 0.13605497680284598, 0.5847475632048942],
    [0.1225148226554415, 0.5659331650728008, 0.06583868706004439],
    [0.1225148226554415, 0.5659331650728008, 0.2457133252117132],
    [0.5441518440112253, 0.0706797241593969, 0.08139566701467026],
    [0.5441518440112253, 0.0706797241593969, 0.30377276481470755],
    [0.5441518440112253, 0.29399880063162287, 0.03420279323676641],
    [0.5441518440112253, 0.29399880063162287, 0.12764656212038542],
];
pub(super) const WTS_DEG3: [f64; 8] = [
    0.03697985635885293,
    0.03697985635885293,
    0.02115700645452407,
    0.02115700645452407,
    0.016027040598476597,
    0.016027040598476597,
    0.009169429921479734,
    0.009169429921479734,
];

pub(super) const PTS_DEG4: [[f64; 3]; 27] = [
    [0.0729940240731497, 0.08212156786344241, 0.09521987984171491],
    [0.0729940240731497, 0.08212156786344241, 0.42244220403170396],
    [0.0729940240731497, 0.08212156786344241, 0.7496645282216929],
    [0.0729940240731497, 0.3795782302805906, 0.061696018609146475],
    [0.0729940240731497, 0.3795782302805906, 0.2737138728231298],
    [0.0729940240731497, 0.3795782302805906, 0.48573172703711315],
    [0.0729940240731497, 0.7301650280476316, 0.022184302640819727],
    [0.0729940240731497, 0.7301650280476316, 0.09842047393960936],
    [0.0729940240731497, 0.7301650280476316, 0.17465664523839897],
    [0.3470037660383518, 0.05784760393614263, 0.06707424175205852],
    [0.3470037660383518, 0.05784760393614263, 0.2975743150127528],
    [0.3470037660383518, 0.05784760393614263, 0.528074388273447],
    [0.3470037660383518, 0.26738032041188453, 0.04345955565380246],
    [0.3470037660383518, 0.26738032041188453, 0.19280795677488183],
    [0.3470037660383518, 0.26738032041188453, 0.3421563578959612],
    [0.3470037660383518, 0.514338662174092, 0.01562693925790165],
    [0.3470037660383518, 0.514338662174092, 0.06932878589377812],
    [0.3470037660383518, 0.514338662174092, 0.1230306325296546],
    [0.7050022098884984, 0.026133252286734836, 0.0303014811742758],
    [0.7050022098884984, 0.026133252286734836, 0.13443226891238338],
    [0.7050022098884984, 0.026133252286734836, 0.238563056650491],
    [0.7050022098884984, 0.12079182013390256, 0.019633302935484487],
    [0.7050022098884984, 0.12079182013390256, 0.08710298498879954],
    [0.7050022098884984, 0.12079182013390256, 0.1545726670421146],
    [0.7050022098884984, 0.2323578005798647, 0.007059631139554789],
    [0.7050022098884984, 0.2323578005798647, 0.03131999476581847],
    [0.7050022098884984, 0.2323578005798647, 0.055580358392082155],
];
pub(super) const WTS_DEG4: [f64; 27] = [
    0.008770474929651053,
    0.01403275988744167,
    0.008770474929651053,
    0.01000614257217611,
    0.016009828115481756,
    0.01000614257217611,
    0.0030478770905181885,
    0.004876603344829096,
    0.0030478770905181885,
    0.008162650766546693,
    0.013060241226474693,
    0.008162650766546693,
    0.009312682379470461,
    0.014900291807152721,
    0.009312682379470461,
    0.0028366486956309255,
    0.004538637913009475,
    0.0028366486956309255,
    0.0016716811314837058,
    0.0026746898103739264,
    0.0016716811314837058,
    0.0019072034149817869,
    0.0030515254639708555,
    0.0019072034149817869,
    0.000580935315837386,
    0.0009294965053398166,
    0.000580935315837386,
];

pub(super) const PTS_DEG5: [[f64; 3]; 27] = [
    [0.0729940240731497, 0.08212156786344241, 0.09521987984171491],
    [0.0729940240731497, 0.08212156786344241, 0.42244220403170396],
    [0.0729940240731497, 0.08212156786344241, 0.7496645282216929],
    [0.0729940240731497, 0.3795782302805906, 0.061696018609146475],
    [0.0729940240731497, 0.3795782302805906, 0.2737138728231298],
    [0.0729940240731497, 0.3795782302805906, 0.48573172703711315],
    [0.0729940240731497, 0.7301650280476316, 0.022184302640819727],
    [0.0729940240731497, 0.7301650280476316, 0.09842047393960936],
    [0.0729940240731497, 0.7301650280476316, 0.17465664523839897],
    [0.3470037660383518, 0.05784760393614263, 0.06707424175205852],
    [0.3470037660383518, 0.05784760393614263, 0.2975743150127528],
    [0.3470037660383518, 0.05784760393614263, 0.528074388273447],
    [0.3470037660383518, 0.26738032041188453, 0.04345955565380246],
    [0.3470037660383518, 0.26738032041188453, 0.19280795677488183],
    [0.3470037660383518, 0.26738032041188453, 0.3421563578959612],
    [0.3470037660383518, 0.514338662174092, 0.01562693925790165],
    [0.3470037660383518, 0.514338662174092, 0.06932878589377812],
    [0.3470037660383518, 0.514338662174092, 0.1230306325296546],
    [0.7050022098884984, 0.026133252286734836, 0.0303014811742758],
    [0.7050022098884984, 0.026133252286734836, 0.13443226891238338],
    [0.7050022098884984, 0.026133252286734836, 0.238563056650491],
    [0.7050022098884984, 0.12079182013390256, 0.019633302935484487],
    [0.7050022098884984, 0.12079182013390256, 0.08710298498879954],
    [0.7050022098884984, 0.12079182013390256, 0.1545726670421146],
    [0.7050022098884984, 0.2323578005798647, 0.007059631139554789],
    [0.7050022098884984, 0.2323578005798647, 0.03131999476581847],
    [0.7050022098884984, 0.2323578005798647, 0.055580358392082155],
];
pub(super) const WTS_DEG5: [f64; 27] = [
    0.008770474929651053,
    0.01403275988744167,
    0.008770474929651053,
    0.01000614257217611,
    0.016009828115481756,
    0.01000614257217611,
    0.0030478770905181885,
    0.004876603344829096,
    0.0030478770905181885,
    0.008162650766546693,
    0.013060241226474693,
    0.008162650766546693,
    0.009312682379470461,
    0.014900291807152721,
    0.009312682379470461,
    0.0028366486956309255,
    0.004538637913009475,
    0.0028366486956309255,
    0.0016716811314837058,
    0.0026746898103739264,
    0.0016716811314837058,
    0.0019072034149817869,
    0.0030515254639708555,
    0.0019072034149817869,
    0.000580935315837386,
    0.0009294965053398166,
    0.000580935315837386,
];

pub(super) const PTS_DEG6: [[f64; 3]; 64] = [
    [0.048500549446997276, 0.05433461122723453, 0.06229180934845269],
    [0.048500549446997276, 0.05433461122723453, 0.2960729004920768],
    [0.048500549446997276, 0.05433461122723453, 0.6010919388336914],
    [0.048500549446997276, 0.05433461122723453, 0.8348730299773154],
    [0.048500549446997276, 0.2634159753661123, 0.04777490464781691],
    [0.048500549446997276, 0.2634159753661123, 0.22707406860967846],
    [0.048500549446997276, 0.2634159753661123, 0.461009406577212],
    [0.048500549446997276, 0.2634159753661123, 0.6403085705390735],
    [0.048500549446997276, 0.5552859757470137, 0.027509832253848288],
    [0.048500549446997276, 0.5552859757470137, 0.13075420207953337],
    [0.048500549446997276, 0.5552859757470137, 0.2654592727264557],
    [0.048500549446997276, 0.5552859757470137, 0.3687036425521408],
    [0.048500549446997276, 0.8185180164205335, 0.009233146216573625],
    [0.048500549446997276, 0.8185180164205335, 0.0438851336893508],
    [0.048500549446997276, 0.8185180164205335, 0.08909630044311856],
    [0.048500549446997276, 0.8185180164205335, 0.12374828791589573],
    [0.23860073755186234, 0.0434790928042876, 0.04984652136888425],
    [0.23860073755186234, 0.0434790928042876, 0.2369204605788584],
    [0.23860073755186234, 0.0434790928042876, 0.4809997090649916],
    [0.23860073755186234, 0.0434790928042876, 0.6680736482749657],
    [0.23860073755186234, 0.21078806639798717, 0.03822995078056706],
    [0.23860073755186234, 0.21078806639798717, 0.1817069135037572],
    [0.23860073755186234, 0.21078806639798717, 0.3689042825463933],
    [0.23860073755186234, 0.21078806639798717, 0.5123812452695834],
    [0.23860073755186234, 0.444345324777483, 0.02201363960428823],
    [0.23860073755186234, 0.444345324777483, 0.10463080453434874],
    [0.23860073755186234, 0.444345324777483, 0.21242313313630587],
    [0.23860073755186234, 0.444345324777483, 0.29504029806636634],
    [0.23860073755186234, 0.6549862048169314, 0.007388454838611975],
    [0.23860073755186234, 0.6549862048169314, 0.03511731762334665],
    [0.23860073755186234, 0.6549862048169314, 0.07129574000785961],
    [0.23860073755186234, 0.6549862048169314, 0.09902460279259427],
    [0.5170472951043674, 0.027578625974397006, 0.031617462101731886],
    [0.5170472951043674, 0.027578625974397006, 0.1502777621740506],
    [0.5170472951043674, 0.027578625974397006, 0.3050963167471849],
    [0.5170472951043674, 0.027578625974397006, 0.4237566168195036],
    [0.5170472951043674, 0.13370208226799038, 0.02424911481807402],
    [0.5170472951043674, 0.13370208226799038, 0.1152560157370178],
    [0.5170472951043674, 0.13370208226799038, 0.23399460689062437],
    [0.5170472951043674, 0.13370208226799038, 0.32500150780956816],
    [0.5170472951043674, 0.2818465778637801, 0.013963169280339022],
    [0.5170472951043674, 0.2818465778637801, 0.0663669280461273],
    [0.5170472951043674, 0.2818465778637801, 0.13473919898572514],
    [0.5170472951043674, 0.2818465778637801, 0.18714295775151343],
    [0.5170472951043674, 0.4154553003749571, 0.004686469274784633],
    [0.5170472951043674, 0.4154553003749571, 0.022274783246233516],
    [0.5170472951043674, 0.4154553003749571, 0.04522262127444195],
    [0.5170472951043674, 0.4154553003749571, 0.06281093524589083],
    [0.7958514178967728, 0.011657740668923408, 0.013364994112965895],
    [0.7958514178967728, 0.011657740668923408, 0.06352380214147103],
    [0.7958514178967728, 0.011657740668923408, 0.1289670392928327],
    [0.7958514178967728, 0.011657740668923408, 0.17912584732133785],
    [0.7958514178967728, 0.056517108699407355, 0.010250325460829475],
    [0.7958514178967728, 0.056517108699407355, 0.048719785505009605],
    [0.7958514178967728, 0.056517108699407355, 0.0989116878988102],
    [0.7958514178967728, 0.056517108699407355, 0.13738114794299033],
    [0.7958514178967728, 0.11913915929712367, 0.005902361000058099],
    [0.7958514178967728, 0.11913915929712367, 0.02805391526296908],
    [0.7958514178967728, 0.11913915929712367, 0.05695550754313443],
    [0.7958514178967728, 0.11913915929712367, 0.0791070618060454],
    [0.7958514178967728, 0.175616803962505, 0.0019810139747004326],
    [0.7958514178967728, 0.175616803962505, 0.009415757216553928],
    [0.7958514178967728, 0.175616803962505, 0.01911602092416824],
    [0.7958514178967728, 0.175616803962505, 0.026550764166021736],
];
pub(super) const WTS_DEG6: [f64; 64] = [
    0.0026134590075074064,
    0.00489961445988876,
    0.00489961445988876,
    0.0026134590075074064,
    0.0039241267807630644,
    0.00735680500908295,
    0.00735680500908295,
    0.0039241267807630644,
    0.0025043094430090133,
    0.004694984969634407,
    0.004694984969634407,
    0.0025043094430090133,
    0.0006013729287201745,
    0.0011274313042136626,
    0.0011274313042136626,
    0.0006013729287201745,
    0.003381089578564937,
    0.0063387393265891935,
    0.0063387393265891935,
    0.003381089578564937,
    0.0050767293939918325,
    0.009517660952894894,
    0.009517660952894894,
    0.0050767293939918325,
    0.0032398803788146044,
    0.006074005640321842,
    0.006074005640321842,
    0.0032398803788146044,
    0.0007780094259316958,
    0.0014585827526946153,
    0.0014585827526946153,
    0.0007780094259316958,
    0.0016175887234345168,
    0.003032594380369403,
    0.003032594380369403,
    0.0016175887234345168,
    0.0024288206593849693,
    0.004553461442867273,
    0.004553461442867273,
    0.0024288206593849693,
    0.001550031090353911,
    0.002905939875758178,
    0.002905939875758178,
    0.001550031090353911,
    0.00037221707525626345,
    0.0006978185458062604,
    0.0006978185458062604,
    0.00037221707525626345,
    0.00024398542162060643,
    0.00045741467393993214,
    0.00045741467393993214,
    0.00024398542162060643,
    0.00036634579855543273,
    0.000686811297504771,
    0.000686811297504771,
    0.00036634579855543273,
    0.00023379551527910795,
    0.0004383110215343274,
    0.0004383110215343274,
    0.00023379551527910795,
    5.614254026695112e-05,
    0.00010525391877839167,
    0.00010525391877839167,
    5.614254026695112e-05,
];

